#pragma once

#include <array>
#include <string>
#include <vector>

#include "superrad/hamiltonian.hpp"

namespace superrad {

// χ₀(y) = normalization · ∏ exp(−1/(1−uᵢ²)), uᵢ = (yᵢ−y₀ᵢ)/wᵢ, zero outside the box.
struct BumpSpec {
  SpatialPoint center;
  std::array<double, 3> halfwidths{0.05, 0.05, 0.05};  // (w_ρ, w_φ, w_z)
  double normalization = 1.0;
};

// Composite Gauss–Legendre: `panels` subintervals per axis, `order` nodes each.
// The convergence check repeats the integral at `check_order`.
struct QuadratureSpec {
  int order = 32;
  int panels = 8;
  int check_order = 64;
  double tolerance = 1e-9;
  bool parallel = true;
};

// All energies are E₀/k². Planar (acoustic) energies are per unit z.
struct EnergyReport {
  double e_plus = 0.0;
  double e_minus = 0.0;
  double e_sum = 0.0;
  double additivity_residual = 0.0;  // |e_sum − (e_plus+e_minus)| / |e_sum|
  double convergence = 0.0;          // worst relative change between order and check_order
  double lambda_minus_min = 0.0;     // over quadrature nodes of the support
  double lambda_minus_max = 0.0;
  bool support_in_ergoregion = false;
  bool planar = false;
  bool superradiant = false;
  std::string reason;  // why superradiance was not certified, empty otherwise
};

// True for the acoustic model, whose Hamiltonian has no z dependence.
bool planar_measure(const MetricModel& model);

// ±∫ λ^± √Δ₁ χ₀² ρ dρ dφ dz for the constant covector components η on the support.
double energy_branch(const MetricModel& model, const BumpSpec& bump, const SpatialCovector& eta,
                     Branch branch, const QuadratureSpec& q = {});
// 2∫ Δ₁/α χ₀² with α the ξ₀² coefficient (1+K for Kerr).
double energy_sum(const MetricModel& model, const BumpSpec& bump, const SpatialCovector& eta,
                  const QuadratureSpec& q = {});

EnergyReport superradiance_report(const MetricModel& model, const BumpSpec& bump,
                                  const SpatialCovector& eta, const QuadratureSpec& q = {});

// Gauss–Legendre nodes and weights on [lo, hi] split into equal panels.
struct QuadratureRule {
  std::vector<double> x, w;
};
QuadratureRule composite_gauss(double lo, double hi, int order, int panels);

}  // namespace superrad
