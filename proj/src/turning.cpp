#include "superrad/turning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "superrad/errors.hpp"

namespace superrad {

double acoustic_xi0(double A, double B, double rho0, const SpatialCovector& eta, Branch branch) {
  const auto model = MetricModel::acoustic(A, B);
  return lambda_roots(model, {rho0, 0.0, 0.0}, eta).of(branch);
}

std::vector<double> acoustic_turning_exact(double A, double B, double rho0,
                                           const SpatialCovector& eta, Branch branch) {
  const double xp = eta[1], xz = eta[2];
  if (xp == 0.0) throw DomainError("turning roots: ξ_φ = 0 makes the equation degenerate");
  const double x0 = acoustic_xi0(A, B, rho0, eta, branch);
  // a2 u² + a1 u + a0 = 0, u = 1/ρ²
  const double a2 = (A * A + B * B) * xp * xp;
  const double a1 = 2.0 * x0 * B * xp - xp * xp + A * A * xz * xz;
  const double a0 = x0 * x0 - xz * xz;
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  std::vector<double> rho;
  if (disc < 0.0) return rho;
  const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
  std::vector<double> u;
  if (q != 0.0) {
    u.push_back(q / a2);
    u.push_back(a0 / q);
  } else {
    u.push_back(0.0);
  }
  for (double v : u)
    if (v > 0.0 && std::isfinite(v)) rho.push_back(1.0 / std::sqrt(v));
  std::sort(rho.begin(), rho.end());
  rho.erase(std::unique(rho.begin(), rho.end()), rho.end());
  return rho;
}

std::vector<double> acoustic_turning_asymptotic(double A, double B, double rho0,
                                                const SpatialCovector& eta, Branch branch) {
  const double d1 = eta[0] * eta[0] + eta[1] * eta[1] / (rho0 * rho0) + eta[2] * eta[2];
  if (!(d1 > 0.0)) throw DomainError("turning expansion: zero covector");
  const double xp = std::abs(eta[1]) / std::sqrt(d1);
  if (xp == 0.0 || B == 0.0) throw DomainError("turning expansion: needs B ≠ 0 and ξ_φ ≠ 0");
  const double s = branch == Branch::Plus ? 1.0 : -1.0;
  const double a2r = A * A / (rho0 * rho0);
  const double Bb = std::abs(B);
  const double base = 1.0 / (rho0 * rho0) + (s - 2.0 * a2r) / (Bb * xp);
  const double spread = std::sqrt(std::max(0.0, 1.0 - a2r)) / (Bb * rho0);
  std::vector<double> rho;
  for (double u : {base - spread, base + spread})
    if (u > 0.0) rho.push_back(1.0 / std::sqrt(u));
  std::sort(rho.begin(), rho.end());
  return rho;
}

KerrCertificate kerr_turning_certificate(double m, double a, double rho0) {
  const auto model = MetricModel::kerr(m, a);
  if (!(rho0 > a)) throw DomainError("turning certificate: ρ₀ must exceed a");
  const SpatialPoint p0{rho0, 0.0, 0.0};
  if (region_classify(model, p0) != Region::Ergoregion)
    throw DomainError("turning certificate: ρ₀ is not in the ergoregion");
  const double K0 = metric_fields(model, p0).K;
  KerrCertificate c;
  c.xi0_minus = (K0 - 1.0) / (K0 + 1.0);
  c.ergosphere_rho = ergosphere_radius(model);
  c.delta2_at_rho0 = delta2(model, p0, c.xi0_minus, a, 0.0);
  c.delta2_at_ergosphere = delta2(model, {c.ergosphere_rho, 0.0, 0.0}, c.xi0_minus, a, 0.0);
  c.holds = c.delta2_at_rho0 > 0.0 && c.delta2_at_ergosphere < 0.0;
  return c;
}

TurningReport acoustic_turning_report(double A, double B, double rho0, const SpatialCovector& eta,
                                      Branch branch, const GeodesicPath* path) {
  const auto model = MetricModel::acoustic(A, B);
  TurningReport r;
  r.branch = branch;
  r.xi0 = acoustic_xi0(A, B, rho0, eta, branch);
  r.exact_roots = acoustic_turning_exact(A, B, rho0, eta, branch);
  r.asymptotic_roots = acoustic_turning_asymptotic(A, B, rho0, eta, branch);
  for (double rho : r.exact_roots) {
    r.residuals.push_back(std::abs(delta2(model, {rho, 0.0, 0.0}, r.xi0, eta[1], eta[2])));
    const double q = eta[1] / (rho * rho);
    r.residual_scales.push_back(std::max({1.0, r.xi0 * r.xi0, q * q}));
  }
  if (path) {
    for (const auto& e : path->events) {
      if (e.kind != EventKind::TurningPoint) continue;
      r.numeric_roots.push_back(e.data);
      double best = std::numeric_limits<double>::infinity();
      for (double x : r.exact_roots) best = std::min(best, std::abs(e.data - x) / x);
      r.max_numeric_rel_error = std::max(r.max_numeric_rel_error, best);
    }
  }
  return r;
}

}  // namespace superrad
