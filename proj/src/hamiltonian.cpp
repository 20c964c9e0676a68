#include "superrad/hamiltonian.hpp"

#include <cmath>

#include "superrad/detail/symbol.hpp"
#include "superrad/errors.hpp"

namespace superrad {

const char* to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

double eval_H(const MetricModel& model, const SpatialPoint& p, const Covector& xi) {
  const auto s = detail::symbol<double>(model, p.rho, p.z, false);
  return detail::hamiltonian(s, p.rho, xi.xi0, xi.xi_rho, xi.xi_phi, xi.xi_z);
}

double leading_coefficient(const MetricModel& model, const SpatialPoint& p) {
  return detail::symbol<double>(model, p.rho, p.z, false).alpha;
}

LambdaRoots lambda_roots(const MetricModel& model, const SpatialPoint& p,
                         const SpatialCovector& xi) {
  if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0)
    throw DomainError("lambda_roots: zero spatial covector");
  const auto s = detail::symbol<double>(model, p.rho, p.z, false);
  const auto r = detail::lambda_roots(s, p.rho, xi[0], xi[1], xi[2]);
  return {r[0], r[1]};
}

double delta1(const MetricModel& model, const SpatialPoint& p, const Covector& xi) {
  const auto s = detail::symbol<double>(model, p.rho, p.z, false);
  return detail::delta1(s, p.rho, xi.xi_rho, xi.xi_phi, xi.xi_z);
}

double delta2(const MetricModel& model, const SpatialPoint& p, double xi0, double xi_phi,
              double xi_z) {
  const auto s = detail::symbol<double>(model, p.rho, p.z, false);
  return detail::delta2(model, s, p.rho, xi0, xi_phi, xi_z);
}

double delta3(const MetricModel& model, const SpatialPoint& p, double xi0, double xi_rho,
              double xi_phi) {
  const auto s = detail::symbol<double>(model, p.rho, p.z, false);
  return detail::delta3(model, s, p.rho, xi0, xi_rho, xi_phi);
}

HamiltonianGradient grad_H(const MetricModel& model, const SpatialPoint& p, const Covector& xi) {
  const auto s = detail::symbol<double>(model, p.rho, p.z, true);
  const auto g = detail::gradient(s, p.rho, xi.xi0, xi.xi_rho, xi.xi_phi, xi.xi_z);
  return {g.xi0, g.xi_rho, g.xi_phi, g.xi_z, g.rho, 0.0, g.z};
}

}  // namespace superrad
