#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "superrad/errors.hpp"
#include "superrad/scenarios.hpp"
#include "superrad/turning.hpp"

using namespace superrad;

namespace {

// Sign changes of Δ₂ on a fine grid, refined by bisection.
std::vector<double> bisection_roots(double A, double B, double rho0, const SpatialCovector& eta, Branch br) {
  const auto M = MetricModel::acoustic(A, B);
  const double xi0 = acoustic_xi0(A, B, rho0, eta, br);
  const auto f = [&](double r) { return delta2(M, {r, 0, 0}, xi0, eta[1], eta[2]); };
  std::vector<double> roots;
  const double lo = std::max(1e-3, std::abs(A) * 1e-3);
  double prev = f(lo), x = lo;
  for (int i = 1; i <= 200000; ++i) {
    const double xn = lo * std::pow(1e5, i / 200000.0);
    const double v = f(xn);
    if ((v < 0) != (prev < 0)) roots.push_back(oracle::bisect(f, x, xn));
    prev = v;
    x = xn;
  }
  return roots;
}

}  // namespace

TEST_CASE("exact turning radii match a bisection oracle") {
  for (double B : {10.0, 20.0}) {
    const auto d = acoustic_superradiant_data(-1.0, B, 2.5);
    for (auto br : {Branch::Plus, Branch::Minus}) {
      const auto exact = acoustic_turning_exact(-1.0, B, 2.5, d.eta, br);
      const auto oracle_roots = bisection_roots(-1.0, B, 2.5, d.eta, br);
      REQUIRE(exact.size() == oracle_roots.size());
      for (std::size_t i = 0; i < exact.size(); ++i) CHECK(exact[i] == doctest::Approx(oracle_roots[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("reference turning radii for A=-1, B=10, rho0=2.5") {
  const auto d = acoustic_superradiant_data(-1.0, 10.0, 2.5);
  const auto p = acoustic_turning_exact(-1.0, 10.0, 2.5, d.eta, Branch::Plus);
  const auto m = acoustic_turning_exact(-1.0, 10.0, 2.5, d.eta, Branch::Minus);
  REQUIRE(p.size() == 2);
  REQUIRE(m.size() == 2);
  CHECK(p[0] == doctest::Approx(2.00582).epsilon(1e-5));
  CHECK(p[1] == doctest::Approx(2.44011).epsilon(1e-5));
  CHECK(m[0] == doctest::Approx(3.12645).epsilon(1e-5));
  CHECK(m[1] == doctest::Approx(4.46454).epsilon(1e-5));
  // ordering around ρ₀
  CHECK(p[1] < 2.5);
  CHECK(m[0] > 2.5);
}

TEST_CASE("asymptotic turning radii improve as B grows") {
  for (auto br : {Branch::Plus, Branch::Minus}) {
    double prev = 1e300;
    for (double B : {10.0, 20.0, 40.0, 80.0}) {
      const auto d = acoustic_superradiant_data(-1.0, B, 2.5);
      const auto ex = acoustic_turning_exact(-1.0, B, 2.5, d.eta, br);
      const auto as = acoustic_turning_asymptotic(-1.0, B, 2.5, d.eta, br);
      REQUIRE(ex.size() == as.size());
      double err = 0;
      for (std::size_t i = 0; i < ex.size(); ++i) err = std::max(err, std::abs(as[i] - ex[i]) / ex[i]);
      CHECK(err <= 0.5 * prev);
      prev = err;
    }
  }
}

TEST_CASE("short-lived data has no plus turning point") {
  const auto d = acoustic_shortlived_data(-2.0, 1.0, 2.1);
  CHECK(acoustic_turning_exact(-2.0, 1.0, 2.1, d.eta, Branch::Plus).empty());
  CHECK(bisection_roots(-2.0, 1.0, 2.1, d.eta, Branch::Plus).empty());
  const auto m = acoustic_turning_exact(-2.0, 1.0, 2.1, d.eta, Branch::Minus);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == doctest::Approx(2.116).epsilon(1e-3));
}

TEST_CASE("purely radial data has no angular turning structure") {
  CHECK_THROWS_AS(acoustic_turning_exact(-1.0, 10.0, 2.5, {0.5, 0.0, 0.0}, Branch::Plus), DomainError);
}

TEST_CASE("turning report compares numeric events with exact roots") {
  const auto M = MetricModel::acoustic(-1.0, 10.0);
  const auto d = acoustic_superradiant_data(-1.0, 10.0, 2.5);
  const auto path = integrate(init_state(M, d.y0, d.eta, Branch::Plus), M, Direction::Backward, {});
  const auto r = acoustic_turning_report(-1.0, 10.0, 2.5, d.eta, Branch::Plus, &path);
  REQUIRE(r.numeric_roots.size() == 1);
  CHECK(r.max_numeric_rel_error < 1e-7);
  for (std::size_t i = 0; i < r.residuals.size(); ++i) CHECK(r.residuals[i] / r.residual_scales[i] < 1e-10);
}

TEST_CASE("Kerr turning certificate") {
  const auto c = kerr_turning_certificate(1.0, 0.8, 2.0);
  CHECK(c.holds);
  CHECK(c.delta2_at_rho0 > 0);
  CHECK(c.delta2_at_ergosphere < 0);
  CHECK(c.ergosphere_rho == doctest::Approx(std::sqrt(4.64)));
  for (double a : {1.0, 1.01, 1.05, 1.2, 1.5}) CHECK(kerr_turning_certificate(1.0, a, kerr_naked_default_rho0(1.0, a)).holds);
  // very close to ρ = a the frequency tends to 1 and the sign pattern is lost
  CHECK_FALSE(kerr_turning_certificate(1.0, 1.05, 1.06).holds);
  CHECK_THROWS_AS(kerr_turning_certificate(1.0, 0.8, 3.0), DomainError);
  CHECK_THROWS_AS(kerr_turning_certificate(1.0, 1.2, 1.1), DomainError);
}
