#include "superrad/fits.hpp"

#include <algorithm>
#include <cmath>

#include "superrad/errors.hpp"

namespace superrad {

const char* to_string(FitLaw law) {
  switch (law) {
    case FitLaw::ExpDecay: return "ExpDecay";
    case FitLaw::OneOverX0: return "OneOverX0";
    case FitLaw::FiniteTimePower: return "FiniteTimePower";
    case FitLaw::PhiLogDivergence: return "PhiLogDivergence";
    case FitLaw::PowerLaw: return "PowerLaw";
  }
  return "?";
}

double Fit::param(const std::string& name) const {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  throw Error("fit has no parameter '" + name + "'");
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("fit_linear: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw DomainError("fit_linear: need at least 3 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0)) throw DomainError("fit_linear: degenerate abscissae");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

namespace {

// keep finite pairs with positive y (logs are taken)
void positive_pairs(const std::vector<double>& x, const std::vector<double>& y,
                    std::vector<double>& lx, std::vector<double>& ly, bool log_x) {
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    const double xv = log_x ? std::abs(x[i]) : x[i];
    const double yv = std::abs(y[i]);
    if (!(yv > 0) || !std::isfinite(yv) || !std::isfinite(xv)) continue;
    if (log_x && !(xv > 0)) continue;
    lx.push_back(log_x ? std::log(xv) : xv);
    ly.push_back(std::log(yv));
  }
}

Fit base(FitLaw law, const std::vector<double>& x) {
  Fit f;
  f.law = law;
  if (!x.empty()) {
    f.x_first = x.front();
    f.x_last = x.back();
  }
  return f;
}

}  // namespace

Fit fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y, int direction) {
  std::vector<double> lx, ly;
  positive_pairs(x, y, lx, ly, false);
  const auto l = fit_linear(lx, ly);
  Fit f = base(FitLaw::ExpDecay, x);
  f.params = {{"rate", -l.slope * direction}, {"log_coefficient", l.intercept}};
  f.r2 = l.r2;
  f.n = l.n;
  return f;
}

Fit fit_one_over_x0(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> rx, ry;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0 || !std::isfinite(y[i])) continue;
    rx.push_back(1.0 / std::abs(x[i]));
    ry.push_back(y[i]);
  }
  const auto l = fit_linear(rx, ry);
  std::vector<double> lx, ly;
  positive_pairs(x, y, lx, ly, true);
  const auto ll = fit_linear(lx, ly);
  Fit f = base(FitLaw::OneOverX0, x);
  f.params = {{"coefficient", l.slope}, {"offset", l.intercept}, {"loglog_exponent", ll.slope}};
  f.r2 = l.r2;
  f.n = l.n;
  return f;
}

Fit fit_finite_time_power(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) throw DomainError("fit_finite_time_power: need at least 3 points");
  const double span = std::abs(x.back() - x.front());
  if (!(span > 0)) throw DomainError("fit_finite_time_power: empty window");
  const double dir = x.back() > x.front() ? 1.0 : -1.0;
  auto profile = [&](double log_d) {
    const double ts = x.back() + dir * span * std::exp(log_d);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = std::abs(ts - x[i]);
      const double yv = std::abs(y[i]);
      if (d > 0 && yv > 0) {
        lx.push_back(std::log(d));
        ly.push_back(std::log(yv));
      }
    }
    return fit_linear(lx, ly);
  };
  // coarse scan of the endpoint offset, then golden-section refinement on R²
  const double lo = std::log(1e-12), hi = 0.0;
  const int N = 121;
  int best = 0;
  double best_r2 = -1;
  for (int i = 0; i < N; ++i) {
    const double r2 = profile(lo + (hi - lo) * i / (N - 1)).r2;
    if (r2 > best_r2) {
      best_r2 = r2;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / (N - 1);
  double b = lo + (hi - lo) * std::min(best + 1, N - 1) / (N - 1);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = profile(c).r2, fd = profile(d).r2;
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = profile(c).r2;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = profile(d).r2;
    }
  }
  const double log_d = 0.5 * (a + b);
  const auto l = profile(log_d);
  Fit f = base(FitLaw::FiniteTimePower, x);
  f.params = {{"exponent", l.slope},
              {"coefficient", std::exp(l.intercept)},
              {"t_star", x.back() + dir * span * std::exp(log_d)}};
  f.r2 = l.r2;
  f.n = l.n;
  return f;
}

Fit fit_phi_log_divergence(const std::vector<double>& gap, const std::vector<double>& phi) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    const double g = std::abs(gap[i]);
    if (!(g > 0) || !std::isfinite(phi[i])) continue;
    lx.push_back(-std::log(g));
    ly.push_back(phi[i]);
  }
  const auto l = fit_linear(lx, ly);
  Fit f = base(FitLaw::PhiLogDivergence, gap);
  f.params = {{"slope", l.slope}, {"phi0", l.intercept}};
  f.r2 = l.r2;
  f.n = l.n;
  return f;
}

Fit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  positive_pairs(x, y, lx, ly, true);
  const auto l = fit_linear(lx, ly);
  Fit f = base(FitLaw::PowerLaw, x);
  f.params = {{"exponent", l.slope}, {"coefficient", std::exp(l.intercept)}};
  f.r2 = l.r2;
  f.n = l.n;
  return f;
}

Fit fit_slope_exponent(const std::vector<double>& y, const std::vector<double>& dydx) {
  std::vector<double> lx, ly;
  positive_pairs(y, dydx, lx, ly, true);
  const auto l = fit_linear(lx, ly);
  Fit f = base(FitLaw::FiniteTimePower, y);
  f.params = {{"q", l.slope}, {"exponent", 1.0 / (1.0 - l.slope)}};
  f.r2 = l.r2;
  f.n = l.n;
  return f;
}

std::pair<std::size_t, std::size_t> fit_window(const GeodesicPath& path, double fraction) {
  const std::size_t n = path.samples.size();
  double x_start = path.samples.empty() ? 0.0 : path.samples.front().x0;
  for (const auto& e : path.events) {
    if (e.kind == EventKind::OuterHorizonCross || e.kind == EventKind::InnerHorizonCross ||
        e.kind == EventKind::TurningPoint)
      x_start = e.x0;
  }
  const std::size_t i0 = path.index_at_x0(x_start);
  // exclude the terminal sample, which sits on the event surface itself
  const std::size_t end = n > 0 ? n - 1 : 0;
  if (i0 >= end) return {end, end};
  const std::size_t len = end - i0;
  const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(len)));
  return {end - std::min(take, len), end};
}

}  // namespace superrad
