#pragma once

#include <vector>

#include "superrad/hamiltonian.hpp"
#include "superrad/integrator.hpp"

namespace superrad {

// Frequency ξ₀ of the given branch for acoustic data (ρ₀, η) on the equatorial plane.
double acoustic_xi0(double A, double B, double rho0, const SpatialCovector& eta, Branch branch);

// Positive roots ρ of Δ₂(ρ) = 0 for conserved (ξ₀, ξ_φ, ξ_z), ascending.
// Solved as a quadratic in u = 1/ρ². Throws DomainError when ξ_φ = 0.
std::vector<double> acoustic_turning_exact(double A, double B, double rho0,
                                           const SpatialCovector& eta, Branch branch);

// Large-B two-term expansion of the same roots, ascending. An expansion, not exact: it is
// derived for planar data with η_ρ = 2A/ρ₀ (A ≤ 0) and is evaluated after rescaling η so
// that Δ₁ = 1 at ρ₀.
std::vector<double> acoustic_turning_asymptotic(double A, double B, double rho0,
                                                const SpatialCovector& eta, Branch branch);

// Sign certificate for a backward-time minus-branch turning point in the Kerr ergoregion,
// using the equatorial corotating data η = (√(ρ₀²−a²)/ρ₀, a, 0).
struct KerrCertificate {
  double xi0_minus = 0.0;             // (K₀−1)/(K₀+1)
  double delta2_at_rho0 = 0.0;        // must be > 0
  double ergosphere_rho = 0.0;        // √(4m²+a²)
  double delta2_at_ergosphere = 0.0;  // must be < 0
  bool holds = false;
};
KerrCertificate kerr_turning_certificate(double m, double a, double rho0);

struct TurningReport {
  Branch branch = Branch::Plus;
  double xi0 = 0.0;
  std::vector<double> exact_roots;
  std::vector<double> asymptotic_roots;  // expansion, not exact
  std::vector<double> numeric_roots;     // TurningPoint events of the supplied path
  std::vector<double> residuals;         // |Δ₂(root)| for the exact roots
  std::vector<double> residual_scales;   // max(1, ξ₀², ξ_φ²/ρ⁴)
  double max_numeric_rel_error = 0.0;    // numeric vs nearest exact root
};

TurningReport acoustic_turning_report(double A, double B, double rho0, const SpatialCovector& eta,
                                      Branch branch, const GeodesicPath* path = nullptr);

}  // namespace superrad
