#pragma once

#include <array>

#include "superrad/metric.hpp"

namespace superrad {

struct Covector {
  double xi0 = 0.0;
  double xi_rho = 0.0;
  double xi_phi = 0.0;  // angular momentum
  double xi_z = 0.0;
};

// Spatial part (ξ_ρ, ξ_φ, ξ_z) of a covector.
using SpatialCovector = std::array<double, 3>;

enum class Branch { Plus, Minus };

const char* to_string(Branch b);
inline int sign(Branch b) { return b == Branch::Plus ? 1 : -1; }

struct LambdaRoots {
  double minus = 0.0;
  double plus = 0.0;
  double of(Branch b) const { return b == Branch::Plus ? plus : minus; }
};

struct HamiltonianGradient {
  double xi0, xi_rho, xi_phi, xi_z;
  double rho, phi, z;  // phi is identically zero
};

double eval_H(const MetricModel& model, const SpatialPoint& p, const Covector& xi);

// Coefficient α of ξ₀² in H: 1+K for Kerr, 1 for acoustic and flat.
double leading_coefficient(const MetricModel& model, const SpatialPoint& p);

LambdaRoots lambda_roots(const MetricModel& model, const SpatialPoint& p,
                         const SpatialCovector& xi);

double delta1(const MetricModel& model, const SpatialPoint& p, const Covector& xi);

// ξ₀ carries the branch, so no separate branch argument is needed.
double delta2(const MetricModel& model, const SpatialPoint& p, double xi0, double xi_phi,
              double xi_z);
double delta3(const MetricModel& model, const SpatialPoint& p, double xi0, double xi_rho,
              double xi_phi);

HamiltonianGradient grad_H(const MetricModel& model, const SpatialPoint& p, const Covector& xi);

}  // namespace superrad
