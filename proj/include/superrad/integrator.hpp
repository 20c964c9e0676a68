#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "superrad/hamiltonian.hpp"
#include "superrad/metric.hpp"

namespace superrad {

enum class Direction { Forward, Backward };
enum class Precision { Double, Quad };

const char* to_string(Direction d);
const char* to_string(Precision p);
inline int sign(Direction d) { return d == Direction::Forward ? 1 : -1; }

struct PhaseState {
  double s = 0.0;
  double x0 = 0.0;
  SpatialPoint p;
  Covector xi;
};

enum class EventKind {
  ErgosphereCross,
  OuterHorizonCross,
  InnerHorizonCross,
  TurningPoint,
  Escape,
  RingTermination,
  CenterTermination,
  MaxTime,
  ApproachTruncation,  // asymptotic horizon approach cut after a fixed number of e-folds
  NumericalFailure,
};

const char* to_string(EventKind k);
bool is_terminal(EventKind k);

struct Event {
  EventKind kind;
  double s = 0.0;
  double x0 = 0.0;
  SpatialPoint location;
  // crossings: dρ/dx₀; turning point: ρ; escape: ρ; ring: (ρ−a)²+z²; center: ρ;
  // max time: x₀; truncation: fitted e-fold rate; failure: scaled H residual
  double data = 0.0;
  std::string note;
};

struct StopSpec {
  double escape_factor = 100.0;  // escape radius = escape_factor·ρ₀ unless escape_radius > 0
  double escape_radius = 0.0;
  double max_x0 = 1e4;           // bound on |x₀|
  double rtol = 1e-10;
  double atol = 1e-12;
  double ring_tol = 1e-10;       // (ρ−a)²+z² < ring_tol·a²
  double center_tol = 1e-8;      // ρ < center_tol·ρ₀
  double approach_depth = 50.0;  // e-folds of horizon gap before truncation
  double h_tol = 1e-8;           // |H| ≤ h_tol·(1+|ξ|²)
  bool stop_at_horizon = false;  // end at the first outer-horizon crossing
  std::size_t max_steps = 400000;
  Precision precision = Precision::Double;
  bool dense = true;             // keep interpolation segments
};

struct SampleDiagnostics {
  double H_residual = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  Region region = Region::Exterior;
  double horizon_gap = 0.0;  // ρ − ρ̂ of the nearest horizon, evaluated in working precision
  double drho_dx0 = 0.0;     // H_ξρ/H_ξ₀ in working precision
  double dz_dx0 = 0.0;       // H_ξz/H_ξ₀
};

// One accepted step: y(θ) = c0 + θ(c1 + (1−θ)(c2 + θ(c3 + (1−θ)c4))), θ ∈ [0, theta_end].
struct DenseSegment {
  double s0 = 0.0;
  double h = 0.0;
  double theta_end = 1.0;
  std::array<std::array<double, 8>, 5> coef{};
  std::array<double, 8> eval(double theta) const;
};

struct GeodesicPath {
  MetricModel model;
  Branch branch = Branch::Plus;
  Direction direction = Direction::Forward;
  StopSpec stops;
  double rho0 = 0.0;
  std::vector<PhaseState> samples;
  std::vector<SampleDiagnostics> diagnostics;
  std::vector<Event> events;
  std::vector<DenseSegment> segments;
  std::size_t rejected_steps = 0;

  const Event* first(EventKind k) const;
  const Event* last(EventKind k) const;
  std::size_t count(EventKind k) const;
  const Event& termination() const;  // final event: terminal, or the horizon crossing under stop_at_horizon

  // Index of the first sample at or beyond x0 along the integration direction.
  std::size_t index_at_x0(double x0) const;
  // Dense-output state at a given x₀ inside the recorded range.
  std::optional<PhaseState> state_at_x0(double x0) const;
};

PhaseState init_state(const MetricModel& model, const SpatialPoint& y0,
                      const SpatialCovector& eta, Branch branch);

GeodesicPath integrate(const PhaseState& state, const MetricModel& model, Direction direction,
                       const StopSpec& stops);

// Diagnostic quotient H_ξρ / H_ξ₀.
double drho_dx0(const PhaseState& state, const MetricModel& model);

// Acoustic white-hole counterpart: (A, B) -> (−A, −B).
MetricModel time_reverse(const MetricModel& model);

// Scaled residual |H|/(1+|ξ|²) at a state.
double scaled_residual(const MetricModel& model, const PhaseState& state);

}  // namespace superrad
