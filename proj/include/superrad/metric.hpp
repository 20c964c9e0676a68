#pragma once

#include <optional>
#include <string>

namespace superrad {

enum class MetricKind { Acoustic, Kerr, Flat };

// A stationary axisymmetric metric. Flat (K = 0) exists as a test stub.
struct MetricModel {
  MetricKind kind = MetricKind::Flat;
  double A = 0.0;  // acoustic radial flow, signed
  double B = 0.0;  // acoustic angular flow, signed
  double m = 1.0;  // Kerr mass
  double a = 0.0;  // Kerr spin

  static MetricModel acoustic(double A, double B);
  static MetricModel kerr(double m, double a);
  static MetricModel flat();

  // Throws DomainError on invalid parameters.
  void validate() const;
};

struct SpatialPoint {
  double rho = 0.0;
  double phi = 0.0;  // unwrapped
  double z = 0.0;

  double phi_normalized() const;  // in [0, 2π)
};

struct MetricFields {
  double K = 0.0;
  double b_rho = 0.0;
  double b_phi = 0.0;
  double b_z = 0.0;
  double r = 0.0;  // Kerr only
};

enum class Region { Exterior, Ergoregion, BetweenHorizons, InsideInner, NoHorizonInterior };

std::string to_string(MetricKind k);
std::string to_string(Region r);

// Positive root of ρ²/(r²+a²) + z²/r² = 1.
double kerr_r(double rho, double z, double a);

MetricFields metric_fields(const MetricModel& model, const SpatialPoint& p);
Region region_classify(const MetricModel& model, const SpatialPoint& p);
// Same classification from already evaluated fields (no degeneracy guard).
Region region_from_fields(const MetricModel& model, double rho, const MetricFields& f);

// Kerr horizon radii r± (absent for a > m; coincident for a = m).
struct KerrHorizons {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double rho_plus = 0.0;   // equatorial cylindrical radius √(a²+r₊²)
  double rho_minus = 0.0;  // √(a²+r₋²)
};
std::optional<KerrHorizons> kerr_horizons(double m, double a);

// Equatorial ergosphere radius: √(4m²+a²) for Kerr, √(A²+B²) for acoustic.
double ergosphere_radius(const MetricModel& model);

// Cylindrical radius of the horizon nearest to the given point, if the model has one.
std::optional<double> nearest_horizon_rho(const MetricModel& model, const SpatialPoint& p);

}  // namespace superrad
