#pragma once

#include <optional>
#include <string>
#include <vector>

#include "superrad/energy.hpp"
#include "superrad/fits.hpp"
#include "superrad/integrator.hpp"
#include "superrad/turning.hpp"

namespace superrad {

// ---- initial data presets ----------------------------------------------------------------

struct InitialData {
  SpatialPoint y0;
  SpatialCovector eta{};
};

// "eq-4.9": η_ρ = −2|A|/ρ₀, η_φ = −ρ₀√(1−4A²/ρ₀²). Needs ρ₀ > 2|A|.
InitialData acoustic_superradiant_data(double A, double B, double rho0);
// "eq-5.2": η_ρ = |A|/ρ₀, η_φ = −B.
InitialData acoustic_shortlived_data(double A, double B, double rho0);
// "eq-7.5": corotating data η = (√(ρ₀²−a²)/ρ₀, a, 0) at (ρ₀, 0, z₀).
InitialData kerr_corotating_data(double m, double a, double rho0, double z0 = 0.0);
// "remark-4.2": η_ρ < 0 small, η_φ = −ρ₀√(1−η_ρ²).
InitialData acoustic_naked_data(double B, double rho0, double eta_rho = -0.1);

// Smallest B for which the superradiant acoustic data has λ⁻ > 0.
double acoustic_superradiance_threshold(double A, double rho0);
// Midpoint of the equatorial ergoregion (a, √(4m²+a²)) used for a ≥ m.
double kerr_naked_default_rho0(double m, double a);

// Bump centred on y₀; halfwidths (0.02, 0.05, 0.02) for Kerr, 0.05 otherwise.
BumpSpec default_bump(const MetricModel& model, const SpatialPoint& y0);

// ---- outcomes ------------------------------------------------------------------------------

enum class Classification {
  EscapesToInfinity,
  CrossesOuterHorizon,
  CrossesInnerHorizon,
  TerminatesOnRing,
  TerminatesAtCenter,
  AsymptoticHorizonApproach,
  TurnsThenEscapes,
  Unresolved,
};
const char* to_string(Classification c);

// One asserted property. `value` is the measured quantity, `expected` a readable bound.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string expected;
};

struct BranchOutcome {
  std::string label;  // e.g. "plus_forward"; used for file names
  Branch branch = Branch::Plus;
  Direction direction = Direction::Forward;
  Classification classification = Classification::Unresolved;
  std::string note;
  std::vector<Fit> fits;
  GeodesicPath path;
};

struct ScenarioOutcome {
  std::string id;
  MetricModel model;
  InitialData data;
  std::vector<BranchOutcome> branches;
  std::vector<Check> checks;
  std::vector<TurningReport> turning;
  std::optional<KerrCertificate> certificate;
  std::optional<EnergyReport> energy;

  const BranchOutcome& branch(const std::string& label) const;
  const Check* check(const std::string& name) const;
  bool all_passed() const;
};

struct ScenarioOptions {
  StopSpec stops;                  // base stop spec; scenarios adjust precision and horizon stops
  bool energy = true;              // compute the superradiance report
  std::optional<BumpSpec> bump;    // default: centred on y₀ with per-model halfwidths
  QuadratureSpec quadrature;
  bool strict_audit = false;       // throw AuditViolation instead of recording a failed audit
  double audit_tolerance = 1e-9;
  std::vector<double> winding_spins{1.2, 1.1, 1.05, 1.02, 1.01};  // naked-Kerr sweep
  std::size_t winding_monotone_count = 4;  // leading entries that must be monotone
};

// Classification from the recorded events; an asymptotic approach also needs a resolved fit.
Classification classify(const GeodesicPath& path, const Fit* approach_fit = nullptr);

ScenarioOutcome run_acoustic_superradiant(double A, double B, double rho0,
                                          const ScenarioOptions& opts = {});
ScenarioOutcome run_acoustic_naked(double B, double rho0, double eta_rho = -0.1,
                                   const ScenarioOptions& opts = {});
ScenarioOutcome run_acoustic_shortlived(double A, double B, double rho0,
                                        const ScenarioOptions& opts = {});
// A > 0: the white hole. Compared against the black hole (−A, −B) run backward.
ScenarioOutcome run_white_hole(double A, double B, double rho0, const ScenarioOptions& opts = {});
ScenarioOutcome run_kerr_equatorial(double m, double a, double rho0,
                                    const ScenarioOptions& opts = {});
ScenarioOutcome run_kerr_offequatorial(double m, double a, double rho0, double z0,
                                       const ScenarioOptions& opts = {});
// a ≥ m. rho0 ≤ 0 selects kerr_naked_default_rho0.
ScenarioOutcome run_kerr_extremal_and_naked(double m, double a, double rho0 = 0.0,
                                            const ScenarioOptions& opts = {});

// Plain integration of the requested branch/direction pairs from arbitrary data, run through
// the batch runner. Asymptotic approaches get an exponential fit before classification.
ScenarioOutcome run_trajectories(const MetricModel& model, const InitialData& data,
                                 const std::vector<Branch>& branches,
                                 const std::vector<Direction>& directions,
                                 const ScenarioOptions& opts = {});

// Total |Δφ|/2π accumulated with |r−m| < 0.25m after the backward turning point.
double naked_winding_turns(const GeodesicPath& path, double m, double a);

}  // namespace superrad
