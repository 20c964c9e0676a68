#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "superrad/errors.hpp"
#include "superrad/integrator.hpp"
#include "superrad/scenarios.hpp"

using namespace superrad;

namespace {

double max_abs_H(const GeodesicPath& p) {
  double w = 0;
  for (const auto& d : p.diagnostics) w = std::max(w, std::abs(d.H_residual));
  return w;
}

}  // namespace

TEST_CASE("flat space rays are straight lines at unit speed") {
  const auto M = MetricModel::flat();
  const SpatialPoint y0{2.0, 0.3, 0.5};
  for (auto br : {Branch::Plus, Branch::Minus})
    for (auto dir : {Direction::Forward, Direction::Backward}) {
      const auto st = init_state(M, y0, {0.4, -1.1, 0.2}, br);
      const auto p = integrate(st, M, dir, {});
      REQUIRE(p.termination().kind == EventKind::Escape);
      const auto cart = [](const PhaseState& s) {
        return std::array<double, 3>{s.p.rho * std::cos(s.p.phi), s.p.rho * std::sin(s.p.phi), s.p.z};
      };
      const auto a = cart(p.samples.front());
      const auto b = cart(p.samples[p.samples.size() / 2]);
      for (const auto& s : p.samples) {
        const auto c = cart(s);
        // collinearity: |(b−a)×(c−a)| relative to the lengths
        const std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const std::array<double, 3> v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        const double cx = u[1] * v[2] - u[2] * v[1], cy = u[2] * v[0] - u[0] * v[2], cz = u[0] * v[1] - u[1] * v[0];
        const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        CHECK(std::sqrt(cx * cx + cy * cy + cz * cz) <= 1e-8 * (1 + nu * nv));
        // null: Euclidean distance travelled equals |x₀|
        CHECK(nv == doctest::Approx(std::abs(s.x0 - p.samples.front().x0)).epsilon(1e-8));
      }
    }
}

TEST_CASE("conservation of ξ₀, ξ_φ and H") {
  const auto M = MetricModel::kerr(1.0, 0.8);
  const auto d = kerr_corotating_data(1.0, 0.8, 2.0, 0.3);
  for (auto br : {Branch::Plus, Branch::Minus}) {
    const auto st = init_state(M, d.y0, d.eta, br);
    const auto p = integrate(st, M, Direction::Backward, {});
    for (const auto& s : p.samples) {
      CHECK(s.xi.xi0 == st.xi.xi0);
      CHECK(s.xi.xi_phi == doctest::Approx(st.xi.xi_phi).epsilon(1e-10));
    }
    for (std::size_t i = 0; i < p.samples.size(); ++i)
      CHECK(std::abs(p.diagnostics[i].H_residual) <= 1e-8 * (1 + p.samples[i].xi.xi_rho * p.samples[i].xi.xi_rho));
  }
}

TEST_CASE("equatorial plane is invariant") {
  const auto M = MetricModel::kerr(1.0, 0.8);
  const auto d = kerr_corotating_data(1.0, 0.8, 2.0);
  for (auto br : {Branch::Plus, Branch::Minus}) {
    const auto p = integrate(init_state(M, d.y0, d.eta, br), M, Direction::Forward, {});
    for (const auto& s : p.samples) {
      CHECK(std::abs(s.p.z) < 1e-10);
      CHECK(std::abs(s.xi.xi_z) < 1e-10);
    }
  }
}

TEST_CASE("init_state puts the state on the requested root") {
  const auto M = MetricModel::acoustic(-1.0, 10.0);
  const SpatialPoint y0{2.5, 0, 0};
  const SpatialCovector eta{-0.8, -1.5, 0.0};
  const auto lam = lambda_roots(M, y0, eta);
  CHECK(init_state(M, y0, eta, Branch::Plus).xi.xi0 == lam.plus);
  CHECK(init_state(M, y0, eta, Branch::Minus).xi.xi0 == lam.minus);
}

TEST_CASE("Kerr equatorial events arrive in order") {
  const auto M = MetricModel::kerr(1.0, 0.8);
  const auto d = kerr_corotating_data(1.0, 0.8, 2.0);
  const auto p = integrate(init_state(M, d.y0, d.eta, Branch::Plus), M, Direction::Forward, {});
  const Event* o = p.first(EventKind::OuterHorizonCross);
  const Event* i = p.first(EventKind::InnerHorizonCross);
  const Event* r = p.first(EventKind::RingTermination);
  REQUIRE(o);
  REQUIRE(i);
  REQUIRE(r);
  CHECK(o->x0 < i->x0);
  CHECK(i->x0 < r->x0);
  CHECK(o->location.rho == doctest::Approx(kerr_horizons(1, 0.8)->rho_plus).epsilon(1e-8));
  CHECK(i->location.rho == doctest::Approx(kerr_horizons(1, 0.8)->rho_minus).epsilon(1e-8));
  CHECK(p.termination().kind == EventKind::RingTermination);
  CHECK(max_abs_H(p) < 1e-6);
}

TEST_CASE("turning point event sits on a zero of Δ₂") {
  const auto M = MetricModel::acoustic(-1.0, 10.0);
  const auto d = acoustic_superradiant_data(-1.0, 10.0, 2.5);
  const auto p = integrate(init_state(M, d.y0, d.eta, Branch::Plus), M, Direction::Backward, {});
  const Event* t = p.first(EventKind::TurningPoint);
  REQUIRE(t);
  const auto st = init_state(M, d.y0, d.eta, Branch::Plus);
  const double d2 = delta2(M, t->location, st.xi.xi0, st.xi.xi_phi, 0.0);
  CHECK(std::abs(d2) < 1e-9);
}

TEST_CASE("dense output reproduces samples and interpolates smoothly") {
  const auto M = MetricModel::acoustic(-1.0, 10.0);
  const auto d = acoustic_superradiant_data(-1.0, 10.0, 2.5);
  const auto p = integrate(init_state(M, d.y0, d.eta, Branch::Plus), M, Direction::Forward, {});
  for (std::size_t i = 0; i < p.samples.size(); i += 7) {
    const auto s = p.state_at_x0(p.samples[i].x0);
    REQUIRE(s);
    CHECK(s->p.rho == doctest::Approx(p.samples[i].p.rho).epsilon(1e-9));
  }
  CHECK_FALSE(p.state_at_x0(-1.0));
}

TEST_CASE("quad and double precision agree where both apply") {
  const auto M = MetricModel::kerr(1.0, 0.8);
  const auto d = kerr_corotating_data(1.0, 0.8, 2.0);
  StopSpec q;
  q.precision = Precision::Quad;
  const auto st = init_state(M, d.y0, d.eta, Branch::Plus);
  const auto a = integrate(st, M, Direction::Forward, {});
  const auto b = integrate(st, M, Direction::Forward, q);
  CHECK(a.termination().x0 == doctest::Approx(b.termination().x0).epsilon(1e-7));
}

TEST_CASE("integration is deterministic") {
  const auto M = MetricModel::kerr(1.0, 0.8);
  const auto d = kerr_corotating_data(1.0, 0.8, 2.0);
  const auto st = init_state(M, d.y0, d.eta, Branch::Minus);
  const auto a = integrate(st, M, Direction::Forward, {});
  const auto b = integrate(st, M, Direction::Forward, {});
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].x0 == b.samples[i].x0);
    CHECK(a.samples[i].p.rho == b.samples[i].p.rho);
  }
}

TEST_CASE("time reversal flips the flow and the frequency") {
  const auto M = MetricModel::acoustic(-1.0, 10.0);
  const auto W = time_reverse(M);
  CHECK(W.A == 1.0);
  CHECK(W.B == -10.0);
  CHECK(time_reverse(W).A == M.A);
  const auto d = acoustic_superradiant_data(-1.0, 10.0, 2.5);
  CHECK(init_state(W, d.y0, d.eta, Branch::Minus).xi.xi0 == -init_state(M, d.y0, d.eta, Branch::Plus).xi.xi0);
}

TEST_CASE("max time and stop_at_horizon") {
  const auto M = MetricModel::acoustic(-1.0, 10.0);
  const auto d = acoustic_superradiant_data(-1.0, 10.0, 2.5);
  StopSpec s;
  s.max_x0 = 0.5;
  const auto p = integrate(init_state(M, d.y0, d.eta, Branch::Plus), M, Direction::Forward, s);
  CHECK(p.termination().kind == EventKind::MaxTime);
  CHECK(p.samples.back().x0 == doctest::Approx(0.5));
  StopSpec h;
  h.stop_at_horizon = true;
  const auto q = integrate(init_state(M, d.y0, d.eta, Branch::Minus), M, Direction::Forward, h);
  CHECK(q.termination().kind == EventKind::OuterHorizonCross);
  CHECK(q.samples.back().p.rho == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("horizon quotient") {
  const auto M = MetricModel::acoustic(-2.0, 1.0);
  const auto d = acoustic_shortlived_data(-2.0, 1.0, 2.1);
  CHECK(drho_dx0(init_state(M, d.y0, d.eta, Branch::Plus), M) < 0);
}
