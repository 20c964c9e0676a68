#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "superrad/integrator.hpp"

namespace superrad {

enum class FitLaw {
  ExpDecay,          // y ≈ C·exp(−rate·|x − x_ref|)
  OneOverX0,         // y ≈ C/|x| + offset
  FiniteTimePower,   // y ≈ C·|t* − x|^p with t* fitted
  PhiLogDivergence,  // φ ≈ slope·ln(1/gap) + φ₀
  PowerLaw,          // |y| ≈ C·|x|^p
};

const char* to_string(FitLaw law);

struct Fit {
  FitLaw law = FitLaw::PowerLaw;
  std::vector<std::pair<std::string, double>> params;  // ordered for serialization
  double r2 = 0.0;
  std::size_t n = 0;
  double x_first = 0.0;
  double x_last = 0.0;

  double param(const std::string& name) const;  // throws if absent
  bool resolved(double min_r2 = 0.98) const { return r2 >= min_r2; }
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y = slope·x + intercept. Needs at least 3 points.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

// direction: +1 if x grows along the path, −1 if it shrinks. rate > 0 means decay.
Fit fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y, int direction);
Fit fit_one_over_x0(const std::vector<double>& x, const std::vector<double>& y);
// Endpoint t* is searched beyond the last sample; params: exponent, coefficient, t_star.
Fit fit_finite_time_power(const std::vector<double>& x, const std::vector<double>& y);
Fit fit_phi_log_divergence(const std::vector<double>& gap, const std::vector<double>& phi);
Fit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);
// From |dy/dx| ≈ c·y^q: params q and exponent p = 1/(1−q) of the implied y ~ |t*−x|^p.
Fit fit_slope_exponent(const std::vector<double>& y, const std::vector<double>& dydx);

// Fixed-fraction window: the final `fraction` of samples recorded after the last
// horizon crossing or turning point. Returns [begin, end).
std::pair<std::size_t, std::size_t> fit_window(const GeodesicPath& path, double fraction = 0.3);

}  // namespace superrad
