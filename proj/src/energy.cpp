#include "superrad/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "superrad/errors.hpp"

namespace superrad {

namespace {

template <int N>
void fill_panel(double lo, double hi, QuadratureRule& r) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  // boost stores the nonnegative half; the rule is symmetric
  for (std::size_t i = xs.size(); i-- > 0;) {
    if (xs[i] == 0.0) continue;
    r.x.push_back(c - h * xs[i]);
    r.w.push_back(h * ws[i]);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.x.push_back(c + h * xs[i]);
    r.w.push_back(h * ws[i]);
  }
}

double bump1(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

// Kahan summation in index order, so the result does not depend on scheduling.
double kahan(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

struct Integrals {
  double plus = 0.0, minus = 0.0, sum = 0.0;
  double lmin = std::numeric_limits<double>::infinity();
  double lmax = -std::numeric_limits<double>::infinity();
  bool ergo = true;
};

Integrals integrate_once(const MetricModel& model, const BumpSpec& b, const SpatialCovector& eta,
                         int order, int panels, bool parallel) {
  const bool planar = planar_measure(model);
  const auto& w = b.halfwidths;
  const auto& c = b.center;
  for (double h : w)
    if (!(h > 0.0)) throw DomainError("bump halfwidths must be positive");
  if (!(c.rho - w[0] > 0.0)) throw DomainError("bump support must stay off the axis");

  const auto gr = composite_gauss(c.rho - w[0], c.rho + w[0], order, panels);
  const auto gp = composite_gauss(-1.0, 1.0, order, panels);
  const auto gz = planar ? QuadratureRule{{c.z}, {1.0}}
                         : composite_gauss(c.z - w[2], c.z + w[2], order, panels);

  // the integrand does not depend on φ, so the φ factor separates
  double phi_factor = 0.0;
  for (std::size_t i = 0; i < gp.x.size(); ++i) {
    const double v = bump1(gp.x[i]);
    phi_factor += gp.w[i] * v * v;
  }
  phi_factor *= w[1];

  const std::size_t nr = gr.x.size(), nz = gz.x.size(), n = nr * nz;
  std::vector<double> vp(n), vm(n), vs(n), lm(n);
  std::vector<char> inside(n);

  auto eval = [&](std::size_t k) {
    const std::size_t i = k / nz, j = k % nz;
    const double rho = gr.x[i], z = gz.x[j];
    const SpatialPoint p{rho, c.phi, z};
    const double ur = (rho - c.rho) / w[0];
    double chi = b.normalization * bump1(ur);
    if (!planar) chi *= bump1((z - c.z) / w[2]);
    const double weight = gr.w[i] * gz.w[j] * chi * chi * rho;
    const auto lam = lambda_roots(model, p, eta);
    const Covector xi{0.0, eta[0], eta[1], eta[2]};
    const double d1 = delta1(model, p, xi);
    const double alpha = leading_coefficient(model, p);
    const double sq = std::sqrt(d1);
    vp[k] = weight * lam.plus * sq;
    vm[k] = -weight * lam.minus * sq;
    vs[k] = weight * 2.0 * d1 / alpha;
    lm[k] = lam.minus;
    inside[k] = region_classify(model, p) == Region::Ergoregion;
  };

  if (parallel) {
    // exceptions must not escape an OpenMP region
    std::vector<std::string> errs(n);
#pragma omp parallel for schedule(static)
    for (long k = 0; k < static_cast<long>(n); ++k) {
      try {
        eval(static_cast<std::size_t>(k));
      } catch (const std::exception& e) {
        errs[static_cast<std::size_t>(k)] = e.what();
      }
    }
    for (const auto& e : errs)
      if (!e.empty()) throw DomainError("energy quadrature: " + e);
  } else {
    for (std::size_t k = 0; k < n; ++k) eval(k);
  }

  Integrals r;
  r.plus = phi_factor * kahan(vp);
  r.minus = phi_factor * kahan(vm);
  r.sum = phi_factor * kahan(vs);
  for (std::size_t k = 0; k < n; ++k) {
    r.lmin = std::min(r.lmin, lm[k]);
    r.lmax = std::max(r.lmax, lm[k]);
    r.ergo = r.ergo && inside[k];
  }
  // the nodes never touch the box boundary; check its corners too
  for (double dr : {-w[0], w[0]})
    for (double dz : {-w[2], w[2]}) {
      const SpatialPoint p{c.rho + dr, c.phi, planar ? c.z : c.z + dz};
      r.ergo = r.ergo && region_classify(model, p) == Region::Ergoregion;
    }
  return r;
}

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

struct Checked {
  Integrals v;
  double convergence = 0.0;
};

Checked integrate_checked(const MetricModel& model, const BumpSpec& b, const SpatialCovector& eta,
                          const QuadratureSpec& q) {
  Checked c;
  c.v = integrate_once(model, b, eta, q.order, q.panels, q.parallel);
  const auto hi = integrate_once(model, b, eta, q.check_order, q.panels, q.parallel);
  c.convergence = std::max({rel(c.v.plus, hi.plus), rel(c.v.minus, hi.minus), rel(c.v.sum, hi.sum)});
  if (!(c.convergence <= q.tolerance))
    throw QuadratureNonConvergence("energy quadrature: orders " + std::to_string(q.order) + " and " +
                                   std::to_string(q.check_order) + " differ by " +
                                   std::to_string(c.convergence) + " (relative)");
  return c;
}

}  // namespace

QuadratureRule composite_gauss(double lo, double hi, int order, int panels) {
  if (panels < 1) throw DomainError("quadrature panels must be >= 1");
  QuadratureRule r;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h, b = p + 1 == panels ? hi : lo + (p + 1) * h;
    switch (order) {
      case 8: fill_panel<8>(a, b, r); break;
      case 16: fill_panel<16>(a, b, r); break;
      case 32: fill_panel<32>(a, b, r); break;
      case 64: fill_panel<64>(a, b, r); break;
      default: throw DomainError("quadrature order must be one of 8, 16, 32, 64");
    }
  }
  return r;
}

bool planar_measure(const MetricModel& model) { return model.kind == MetricKind::Acoustic; }

double energy_branch(const MetricModel& model, const BumpSpec& bump, const SpatialCovector& eta,
                     Branch branch, const QuadratureSpec& q) {
  const auto c = integrate_checked(model, bump, eta, q);
  return branch == Branch::Plus ? c.v.plus : c.v.minus;
}

double energy_sum(const MetricModel& model, const BumpSpec& bump, const SpatialCovector& eta,
                  const QuadratureSpec& q) {
  return integrate_checked(model, bump, eta, q).v.sum;
}

EnergyReport superradiance_report(const MetricModel& model, const BumpSpec& bump,
                                  const SpatialCovector& eta, const QuadratureSpec& q) {
  const auto c = integrate_checked(model, bump, eta, q);
  EnergyReport r;
  r.e_plus = c.v.plus;
  r.e_minus = c.v.minus;
  r.e_sum = c.v.sum;
  r.additivity_residual = std::abs(r.e_sum - (r.e_plus + r.e_minus)) / std::abs(r.e_sum);
  r.convergence = c.convergence;
  r.lambda_minus_min = c.v.lmin;
  r.lambda_minus_max = c.v.lmax;
  r.support_in_ergoregion = c.v.ergo;
  r.planar = planar_measure(model);
  const bool gain = r.e_minus < 0.0 && r.e_plus > r.e_sum;
  if (!(r.lambda_minus_min > 0.0))
    r.reason = "lambda_minus not positive on the whole support";
  else if (!gain)
    r.reason = "energy inequalities not satisfied";
  r.superradiant = r.reason.empty();
  return r;
}

}  // namespace superrad
