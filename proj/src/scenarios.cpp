#include "superrad/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "superrad/batch.hpp"
#include "superrad/detail/symbol.hpp"
#include "superrad/errors.hpp"

namespace superrad {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void add(std::vector<Check>& cs, std::string name, bool ok, double value, std::string expected) {
  cs.push_back({std::move(name), ok, value, std::move(expected)});
}

std::string label(Branch b, Direction d) {
  return std::string(to_string(b)) + "_" + to_string(d);
}

BranchOutcome make_branch(GeodesicPath path, std::string lbl) {
  BranchOutcome o;
  o.label = std::move(lbl);
  o.branch = path.branch;
  o.direction = path.direction;
  o.path = std::move(path);
  return o;
}

bool strictly_monotone(const GeodesicPath& p, int sgn) {
  for (std::size_t i = 1; i < p.samples.size(); ++i)
    if (!(sgn * (p.samples[i].p.rho - p.samples[i - 1].p.rho) > 0)) return false;
  return true;
}

// Local-slope exponent over the final decade of a gap shrinking to zero at the terminal
// event. gap[i] > 0 and rate[i] = |d gap/dx₀|; the terminal sample itself is excluded.
Fit terminal_exponent(const std::vector<double>& gap, const std::vector<double>& rate) {
  if (gap.size() < 3) throw DomainError("terminal exponent: too few samples");
  const double g_end = gap[gap.size() - 2];
  std::vector<double> g, r;
  for (std::size_t i = 0; i + 1 < gap.size(); ++i) {
    if (gap[i] > 0 && gap[i] <= 10.0 * g_end) {
      g.push_back(gap[i]);
      r.push_back(rate[i]);
    }
  }
  return fit_slope_exponent(g, r);
}

// Gap to the horizon and φ over the standard fit window.
struct Window {
  std::vector<double> x0, gap, phi;
  std::size_t i0 = 0, i1 = 0;
};

Window approach_window(const GeodesicPath& p) {
  Window w;
  std::tie(w.i0, w.i1) = fit_window(p);
  for (std::size_t i = w.i0; i < w.i1; ++i) {
    w.x0.push_back(p.samples[i].x0);
    w.gap.push_back(p.diagnostics[i].horizon_gap);
    w.phi.push_back(p.samples[i].p.phi);
  }
  return w;
}

StopSpec quad(StopSpec s) {
  s.precision = Precision::Quad;
  return s;
}

StopSpec at_horizon(StopSpec s) {
  s.stop_at_horizon = true;
  return s;
}

void attach_energy(ScenarioOutcome& out, const ScenarioOptions& opts) {
  if (!opts.energy) return;
  const auto bump = opts.bump ? *opts.bump : default_bump(out.model, out.data.y0);
  out.energy = superradiance_report(out.model, bump, out.data.eta, opts.quadrature);
  const auto& e = *out.energy;
  add(out.checks, "energy_additivity", e.additivity_residual < 1e-10, e.additivity_residual, "< 1e-10");
  add(out.checks, "energy_quadrature_convergence", e.convergence < 1e-9, e.convergence, "< 1e-9");
  add(out.checks, "energy_minus_negative", e.e_minus < 0, e.e_minus, "< 0");
  add(out.checks, "energy_plus_exceeds_sum", e.e_plus > e.e_sum, e.e_plus - e.e_sum, "> 0");
  add(out.checks, "superradiant", e.superradiant, e.superradiant ? 1.0 : 0.0, "true");
}

// Exponential horizon approach fit plus φ divergence; returns the decay fit.
Fit fit_spiral(BranchOutcome& b, int dir) {
  const auto w = approach_window(b.path);
  if (w.gap.size() < 3) throw DomainError("approach window too short");
  auto f = fit_exp_decay(w.x0, w.gap, dir);
  b.fits.push_back(f);
  b.fits.push_back(fit_phi_log_divergence(w.gap, w.phi));
  return f;
}

void check_spiral(ScenarioOutcome& out, BranchOutcome& b, double min_r2, double min_turns) {
  const Fit f = fit_spiral(b, sign(b.direction));
  b.classification = classify(b.path, &f);
  const auto w = approach_window(b.path);
  const double turns = std::abs(w.phi.back() - w.phi.front()) / two_pi;
  add(out.checks, b.label + "_approach_rate_positive", f.param("rate") > 0, f.param("rate"), "> 0");
  add(out.checks, b.label + "_approach_fit_r2", f.r2 > min_r2, f.r2, "> " + fmt(min_r2));
  add(out.checks, b.label + "_winding_turns", turns > min_turns, turns, "> " + fmt(min_turns));
}

void check_turning(ScenarioOutcome& out, const BranchOutcome& b, const TurningReport& r) {
  bool ok = !r.numeric_roots.empty();
  add(out.checks, b.label + "_turning_vs_exact", ok && r.max_numeric_rel_error < 1e-7,
      r.max_numeric_rel_error, "< 1e-7 relative");
  double worst = 0.0;
  for (std::size_t i = 0; i < r.residuals.size(); ++i)
    worst = std::max(worst, r.residuals[i] / r.residual_scales[i]);
  add(out.checks, std::string(to_string(r.branch)) + "_exact_root_residual", worst < 1e-10, worst,
      "< 1e-10 scaled");
}

// Relative errors of the expansion at B and at 2B; the second must be at most half the first.
void check_expansion(ScenarioOutcome& out, double A, double B, double rho0, Branch br,
                     const SpatialCovector& eta, const SpatialCovector& eta2) {
  const auto e1 = acoustic_turning_exact(A, B, rho0, eta, br);
  const auto a1 = acoustic_turning_asymptotic(A, B, rho0, eta, br);
  const auto e2 = acoustic_turning_exact(A, 2 * B, rho0, eta2, br);
  const auto a2 = acoustic_turning_asymptotic(A, 2 * B, rho0, eta2, br);
  bool ok = e1.size() == a1.size() && e2.size() == a2.size() && e1.size() == e2.size() && !e1.empty();
  double worst = 0.0;
  if (ok) {
    for (std::size_t i = 0; i < e1.size(); ++i) {
      const double r1 = std::abs(e1[i] - a1[i]) / e1[i];
      const double r2 = std::abs(e2[i] - a2[i]) / e2[i];
      const double ratio = r2 / r1;
      worst = std::max(worst, ratio);
    }
    ok = worst <= 0.5;
  }
  add(out.checks, std::string(to_string(br)) + "_expansion_error_halves", ok, worst,
      "err(2B)/err(B) <= 0.5");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw GateFailed(what);
}

}  // namespace

// ---- presets -------------------------------------------------------------------------------

InitialData acoustic_superradiant_data(double A, double, double rho0) {
  const double q = 4 * A * A / (rho0 * rho0);
  if (!(q < 1)) throw GateFailed("superradiant data needs rho0 > 2|A|");
  return {{rho0, 0.0, 0.0}, {-2 * std::abs(A) / rho0, -rho0 * std::sqrt(1 - q), 0.0}};
}

InitialData acoustic_shortlived_data(double A, double B, double rho0) {
  return {{rho0, 0.0, 0.0}, {std::abs(A) / rho0, -B, 0.0}};
}

InitialData kerr_corotating_data(double, double a, double rho0, double z0) {
  if (!(rho0 > a)) throw GateFailed("corotating data needs rho0 > a");
  return {{rho0, 0.0, z0}, {std::sqrt(rho0 * rho0 - a * a) / rho0, a, 0.0}};
}

InitialData acoustic_naked_data(double, double rho0, double eta_rho) {
  if (!(std::abs(eta_rho) < 1)) throw GateFailed("naked data needs |eta_rho| < 1");
  return {{rho0, 0.0, 0.0}, {eta_rho, -rho0 * std::sqrt(1 - eta_rho * eta_rho), 0.0}};
}

double acoustic_superradiance_threshold(double A, double rho0) {
  const double q = A * A / (rho0 * rho0);
  if (!(4 * q < 1)) throw GateFailed("threshold needs rho0 > 2|A|");
  return (1 + 2 * q) * rho0 / std::sqrt(1 - 4 * q);
}

double kerr_naked_default_rho0(double m, double a) {
  return 0.5 * (a + std::sqrt(4 * m * m + a * a));
}

// ---- outcome helpers -------------------------------------------------------------------------

const char* to_string(Classification c) {
  switch (c) {
    case Classification::EscapesToInfinity: return "EscapesToInfinity";
    case Classification::CrossesOuterHorizon: return "CrossesOuterHorizon";
    case Classification::CrossesInnerHorizon: return "CrossesInnerHorizon";
    case Classification::TerminatesOnRing: return "TerminatesOnRing";
    case Classification::TerminatesAtCenter: return "TerminatesAtCenter";
    case Classification::AsymptoticHorizonApproach: return "AsymptoticHorizonApproach";
    case Classification::TurnsThenEscapes: return "TurnsThenEscapes";
    case Classification::Unresolved: return "Unresolved";
  }
  return "?";
}

const BranchOutcome& ScenarioOutcome::branch(const std::string& lbl) const {
  for (const auto& b : branches)
    if (b.label == lbl) return b;
  throw Error("scenario " + id + " has no branch " + lbl);
}

const Check* ScenarioOutcome::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool ScenarioOutcome::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Classification classify(const GeodesicPath& path, const Fit* approach_fit) {
  if (path.events.empty()) return Classification::Unresolved;
  const auto& last = path.events.back();
  switch (last.kind) {
    case EventKind::Escape:
      return path.count(EventKind::TurningPoint) > 0 ? Classification::TurnsThenEscapes
                                                     : Classification::EscapesToInfinity;
    case EventKind::RingTermination:
      return Classification::TerminatesOnRing;
    case EventKind::CenterTermination:
      return Classification::TerminatesAtCenter;
    case EventKind::OuterHorizonCross:
      return Classification::CrossesOuterHorizon;
    case EventKind::InnerHorizonCross:
      return Classification::CrossesInnerHorizon;
    case EventKind::ApproachTruncation:
    case EventKind::MaxTime:
      if (approach_fit && approach_fit->resolved()) return Classification::AsymptoticHorizonApproach;
      return Classification::Unresolved;
    default:
      return Classification::Unresolved;
  }
}

double naked_winding_turns(const GeodesicPath& path, double m, double a) {
  const Event* tp = path.first(EventKind::TurningPoint);
  if (!tp) return 0.0;
  double w = 0.0;
  for (std::size_t i = path.index_at_x0(tp->x0) + 1; i < path.samples.size(); ++i) {
    const auto& s = path.samples[i].p;
    const double r = std::sqrt(detail::kerr_r_squared(s.rho, s.z, a));
    if (std::abs(r - m) < 0.25 * m) w += std::abs(s.phi - path.samples[i - 1].p.phi);
  }
  return w / two_pi;
}

// ---- acoustic --------------------------------------------------------------------------------

ScenarioOutcome run_acoustic_superradiant(double A, double B, double rho0,
                                          const ScenarioOptions& opts) {
  require(A < 0, "superradiant acoustic scenario needs A < 0 (black hole)");
  require(rho0 > 2 * std::abs(A), "superradiant acoustic scenario needs rho0 > 2|A|");
  const double thr = acoustic_superradiance_threshold(A, rho0);
  require(B > thr, "B = " + fmt(B) + " does not exceed the threshold " + fmt(thr));

  ScenarioOutcome out;
  out.id = "acoustic-superradiant";
  out.model = MetricModel::acoustic(A, B);
  out.data = acoustic_superradiant_data(A, B, rho0);
  add(out.checks, "gate_threshold", B > thr, thr, "< B");
  const auto lam = lambda_roots(out.model, out.data.y0, out.data.eta);
  add(out.checks, "lambda_minus_positive", lam.minus > 0, lam.minus, "> 0");

  const auto& M = out.model;
  const auto st = [&](Branch b) { return init_state(M, out.data.y0, out.data.eta, b); };

  auto pf = make_branch(integrate(st(Branch::Plus), M, Direction::Forward, opts.stops), "plus_forward");
  pf.classification = classify(pf.path);
  add(out.checks, "plus_forward_escapes", pf.path.termination().kind == EventKind::Escape, 0.0, "Escape");
  add(out.checks, "plus_forward_rho_monotone", strictly_monotone(pf.path, +1), 0.0, "strictly increasing");

  auto mf = make_branch(integrate(st(Branch::Minus), M, Direction::Forward, at_horizon(opts.stops)),
                        "minus_forward");
  mf.classification = classify(mf.path);
  const Event* cross = mf.path.first(EventKind::OuterHorizonCross);
  add(out.checks, "minus_forward_crosses_horizon", cross && cross->x0 > 0, cross ? cross->x0 : 0.0,
      "finite x0 > 0");

  auto pb = make_branch(integrate(st(Branch::Plus), M, Direction::Backward, opts.stops), "plus_backward");
  pb.classification = classify(pb.path);
  add(out.checks, "plus_backward_turns_then_escapes",
      pb.classification == Classification::TurnsThenEscapes, 0.0, "TurnsThenEscapes");

  auto mb = make_branch(integrate(st(Branch::Minus), M, Direction::Backward, quad(opts.stops)),
                        "minus_backward");
  check_spiral(out, mb, 0.999, 1.0);

  for (auto* b : {&pb, &mb}) {
    auto r = acoustic_turning_report(A, B, rho0, out.data.eta, b->branch, &b->path);
    check_turning(out, *b, r);
    out.turning.push_back(std::move(r));
  }
  const auto eta2 = acoustic_superradiant_data(A, 2 * B, rho0).eta;
  check_expansion(out, A, B, rho0, Branch::Plus, out.data.eta, eta2);
  check_expansion(out, A, B, rho0, Branch::Minus, out.data.eta, eta2);

  // orderings ρ₂⁺ < ρ₁⁺ < ρ₀ < ρ₁⁻ < ρ₂⁻
  const auto& rp = out.turning[0].exact_roots;
  const auto& rm = out.turning[1].exact_roots;
  add(out.checks, "turning_orderings",
      rp.size() == 2 && rm.size() == 2 && rp[1] < rho0 && rm[0] > rho0, 0.0,
      "rho2+ < rho1+ < rho0 < rho1- < rho2-");

  out.branches = {std::move(pf), std::move(mf), std::move(pb), std::move(mb)};
  attach_energy(out, opts);
  return out;
}

ScenarioOutcome run_acoustic_naked(double B, double rho0, double eta_rho,
                                   const ScenarioOptions& opts) {
  require(B > 0, "naked acoustic scenario needs B > 0");
  require(eta_rho < 0, "naked acoustic scenario needs eta_rho < 0");
  ScenarioOutcome out;
  out.id = "acoustic-naked";
  out.model = MetricModel::acoustic(0.0, B);
  out.data = acoustic_naked_data(B, rho0, eta_rho);
  const double ep = out.data.eta[1];
  const double lhs = (B * B - rho0 * rho0) * ep * ep / std::pow(rho0, 4);
  require(lhs > eta_rho * eta_rho, "gate (B²−ρ₀²)η_φ²/ρ₀⁴ > η_ρ² fails");
  add(out.checks, "gate_naked", true, lhs - eta_rho * eta_rho, "> 0");

  const auto& M = out.model;
  const auto st = [&](Branch b) { return init_state(M, out.data.y0, out.data.eta, b); };

  auto pf = make_branch(integrate(st(Branch::Plus), M, Direction::Forward, opts.stops), "plus_forward");
  pf.classification = classify(pf.path);
  add(out.checks, "plus_forward_escapes", pf.classification == Classification::EscapesToInfinity, 0.0,
      "EscapesToInfinity");

  // the affine parameter converges at the centre, so quad precision is needed to resolve it
  for (auto dir : {Direction::Forward, Direction::Backward}) {
    auto b = make_branch(integrate(st(Branch::Minus), M, dir, quad(opts.stops)), label(Branch::Minus, dir));
    b.classification = classify(b.path);
    add(out.checks, b.label + "_terminates_at_center",
        b.classification == Classification::TerminatesAtCenter, 0.0, "TerminatesAtCenter");
    const auto& p = b.path;
    const std::size_t n = p.samples.size();
    if (n > 3 && b.classification == Classification::TerminatesAtCenter) {
      // last decade of ρ before the centre
      const double r_end = p.samples[n - 2].p.rho;
      double worst = 0.0;
      std::vector<double> rr, dphi;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = p.samples[i].p.rho;
        if (r <= 10 * r_end) worst = std::max(worst, std::abs(std::abs(p.diagnostics[i].drho_dx0) - 1.0));
        if (r < 0.1 * rho0) {
          const double dr = r - p.samples[i - 1].p.rho;
          if (dr != 0.0) {
            rr.push_back(0.5 * (r + p.samples[i - 1].p.rho));
            dphi.push_back((p.samples[i].p.phi - p.samples[i - 1].p.phi) / dr);
          }
        }
      }
      const double expect = dir == Direction::Forward ? -1.0 : 1.0;
      const double s_end = p.diagnostics[n - 2].drho_dx0;
      add(out.checks, b.label + "_terminal_slope", worst < 0.05 && s_end * expect > 0, s_end,
          "within 5% of " + fmt(expect) + " over the last decade");
      if (rr.size() >= 3) {
        auto f = fit_power_law(rr, dphi);
        b.fits.push_back(f);
        add(out.checks, b.label + "_dphi_drho_exponent", std::abs(f.param("exponent") + 2) < 0.1,
            f.param("exponent"), "-2 +- 0.1");
      }
    }
    if (dir == Direction::Backward) {
      add(out.checks, "minus_backward_turns", p.count(EventKind::TurningPoint) == 1, 0.0,
          "one turning point");
    }
    out.branches.push_back(std::move(b));
  }
  auto pb = make_branch(integrate(st(Branch::Plus), M, Direction::Backward, opts.stops), "plus_backward");
  pb.classification = classify(pb.path);
  add(out.checks, "plus_backward_turns_then_escapes",
      pb.classification == Classification::TurnsThenEscapes, 0.0, "TurnsThenEscapes");
  out.branches.insert(out.branches.begin(), std::move(pf));
  out.branches.push_back(std::move(pb));

  for (auto br : {Branch::Plus, Branch::Minus})
    out.turning.push_back(acoustic_turning_report(0.0, B, rho0, out.data.eta, br, nullptr));
  attach_energy(out, opts);
  return out;
}

ScenarioOutcome run_acoustic_shortlived(double A, double B, double rho0,
                                        const ScenarioOptions& opts) {
  require(A < 0, "short-lived scenario needs A < 0");
  require(B > 0 && B < std::abs(A), "short-lived scenario needs 0 < B < |A|");
  require(rho0 > std::abs(A) && rho0 < std::hypot(A, B),
          "short-lived scenario needs |A| < rho0 < sqrt(A²+B²)");
  ScenarioOutcome out;
  out.id = "acoustic-shortlived";
  out.model = MetricModel::acoustic(A, B);
  out.data = acoustic_shortlived_data(A, B, rho0);
  const auto lam = lambda_roots(out.model, out.data.y0, out.data.eta);
  require(lam.minus > 0, "short-lived data has lambda_minus <= 0");
  add(out.checks, "lambda_minus_positive", true, lam.minus, "> 0");

  const auto& M = out.model;
  const auto st = [&](Branch b) { return init_state(M, out.data.y0, out.data.eta, b); };
  add(out.checks, "plus_initial_slope_negative", drho_dx0(st(Branch::Plus), M) < 0,
      drho_dx0(st(Branch::Plus), M), "< 0");

  for (auto br : {Branch::Plus, Branch::Minus}) {
    auto b = make_branch(integrate(st(br), M, Direction::Forward, at_horizon(opts.stops)),
                         label(br, Direction::Forward));
    b.classification = classify(b.path);
    const Event* c = b.path.first(EventKind::OuterHorizonCross);
    add(out.checks, b.label + "_crosses_horizon", c && c->x0 > 0, c ? c->x0 : 0.0, "finite x0 > 0");
    out.branches.push_back(std::move(b));
  }
  auto mb = make_branch(integrate(st(Branch::Minus), M, Direction::Backward, quad(opts.stops)),
                        "minus_backward");
  {
    const Fit f = fit_spiral(mb, -1);
    mb.classification = classify(mb.path, &f);
  }

  auto rp = acoustic_turning_report(A, B, rho0, out.data.eta, Branch::Plus, nullptr);
  add(out.checks, "plus_turning_set_empty", rp.exact_roots.empty(),
      static_cast<double>(rp.exact_roots.size()), "no roots");
  auto rm = acoustic_turning_report(A, B, rho0, out.data.eta, Branch::Minus, &mb.path);
  check_turning(out, mb, rm);
  out.turning = {std::move(rp), std::move(rm)};
  out.branches.push_back(std::move(mb));
  attach_energy(out, opts);
  return out;
}

ScenarioOutcome run_white_hole(double A, double B, double rho0, const ScenarioOptions& opts) {
  require(A > 0, "white-hole scenario needs A > 0");
  ScenarioOutcome out;
  out.id = "white-hole";
  out.model = MetricModel::acoustic(A, B);
  const auto bh = time_reverse(out.model);
  out.data = acoustic_superradiant_data(bh.A, bh.B, rho0);
  add(out.checks, "double_reversal_identity",
      time_reverse(bh).A == out.model.A && time_reverse(bh).B == out.model.B, 0.0, "identity");

  StopSpec window = opts.stops;
  window.max_x0 = 10.0;
  for (auto br : {Branch::Plus, Branch::Minus}) {
    const Branch wb = br == Branch::Plus ? Branch::Minus : Branch::Plus;
    const auto sb = init_state(bh, out.data.y0, out.data.eta, br);
    const auto sw = init_state(out.model, out.data.y0, out.data.eta, wb);
    const auto back = integrate(sb, bh, Direction::Backward, window);
    const auto fwd = integrate(sw, out.model, Direction::Forward, window);
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double x = 10.0 * k / 1000;
      const auto a = back.state_at_x0(-x);
      const auto b = fwd.state_at_x0(x);
      if (!a || !b) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
      worst = std::max({worst, std::abs(a->p.rho - b->p.rho), std::abs(a->p.phi - b->p.phi),
                        std::abs(a->p.z - b->p.z)});
    }
    add(out.checks, std::string("reversal_match_") + to_string(wb), worst < 1e-8, worst, "< 1e-8");
    add(out.checks, std::string("frequency_negated_") + to_string(wb), sw.xi.xi0 == -sb.xi.xi0,
        sw.xi.xi0 + sb.xi.xi0, "xi0 -> -xi0");

    // full forward run of the white hole; the spiralling one needs quad precision
    const bool spiral = br == Branch::Minus;
    auto w = make_branch(integrate(sw, out.model, Direction::Forward, spiral ? quad(opts.stops) : opts.stops),
                         label(wb, Direction::Forward));
    w.note = std::string("mirror of the black-hole ") + to_string(br) + " branch run backward";
    if (spiral) {
      check_spiral(out, w, 0.999, 1.0);
    } else {
      w.classification = classify(w.path);
      add(out.checks, w.label + "_turns_then_escapes",
          w.classification == Classification::TurnsThenEscapes, 0.0, "TurnsThenEscapes");
    }
    out.branches.push_back(std::move(w));
  }
  return out;
}

// ---- Kerr ------------------------------------------------------------------------------------

namespace {

// Fits ρ−a ~ (t₀−x₀)^p near the ring from the final decade of the path.
Fit ring_exponent(const GeodesicPath& p, double a) {
  std::vector<double> g, r;
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    const auto& s = p.samples[i].p;
    g.push_back(std::hypot(s.rho - a, s.z));
    r.push_back(std::abs(p.diagnostics[i].drho_dx0));
  }
  return terminal_exponent(g, r);
}

void check_ring(ScenarioOutcome& out, BranchOutcome& b, double a, double expect, bool horizons) {
  b.classification = classify(b.path);
  const auto& p = b.path;
  bool ordered = true;
  if (horizons) {
    const Event* o = p.first(EventKind::OuterHorizonCross);
    const Event* i = p.first(EventKind::InnerHorizonCross);
    const Event* r = p.first(EventKind::RingTermination);
    ordered = o && r && o->x0 < r->x0 && (!i || (o->x0 <= i->x0 && i->x0 < r->x0));
  }
  add(out.checks, b.label + "_terminates_on_ring",
      b.classification == Classification::TerminatesOnRing && ordered,
      p.events.empty() ? 0.0 : p.events.back().x0, "RingTermination at finite x0");
  if (b.classification != Classification::TerminatesOnRing) return;
  const auto f = ring_exponent(p, a);
  b.fits.push_back(f);
  add(out.checks, b.label + "_terminal_exponent", std::abs(f.param("exponent") - expect) <= 0.1,
      f.param("exponent"), fmt(expect) + " +- 0.1");
  // secondary: finite-time power law over the standard window
  const auto [i0, i1] = fit_window(p);
  std::vector<double> x, y;
  for (std::size_t i = i0; i < i1; ++i) {
    x.push_back(p.samples[i].x0);
    y.push_back(std::hypot(p.samples[i].p.rho - a, p.samples[i].p.z));
  }
  if (x.size() >= 3) b.fits.push_back(fit_finite_time_power(x, y));
}

// φ change over the final decade of ρ−a must be smaller than over the decade before it.
void check_phi_limit(ScenarioOutcome& out, const BranchOutcome& b, double a) {
  const auto& p = b.path;
  const std::size_t n = p.samples.size();
  if (n < 4) return;
  const double g_end = p.samples[n - 2].p.rho - a;
  double phi1 = p.samples[n - 1].p.phi, phi10 = phi1, phi100 = phi1;
  for (std::size_t i = n; i-- > 0;) {
    const double g = p.samples[i].p.rho - a;
    if (g <= 10 * g_end) phi10 = p.samples[i].p.phi;
    if (g <= 100 * g_end) phi100 = p.samples[i].p.phi;
  }
  const double last = std::abs(phi1 - phi10), prev = std::abs(phi10 - phi100);
  add(out.checks, b.label + "_phi_converges", last < prev, last, "< " + fmt(prev));
}

}  // namespace

ScenarioOutcome run_kerr_equatorial(double m, double a, double rho0, const ScenarioOptions& opts) {
  require(a < m, "equatorial Kerr scenario needs a < m");
  const auto h = *kerr_horizons(m, a);
  const double re = std::sqrt(a * a + 4 * m * m);
  require(rho0 > h.rho_plus && rho0 < re,
          "rho0 must lie in (" + fmt(h.rho_plus) + ", " + fmt(re) + ")");
  ScenarioOutcome out;
  out.id = "kerr-equatorial";
  out.model = MetricModel::kerr(m, a);
  out.data = kerr_corotating_data(m, a, rho0);
  const auto& M = out.model;

  const Covector xi0{0.0, out.data.eta[0], out.data.eta[1], out.data.eta[2]};
  const double d1 = delta1(M, out.data.y0, xi0);
  const auto lam = lambda_roots(M, out.data.y0, out.data.eta);
  const double K0 = metric_fields(M, out.data.y0).K;
  add(out.checks, "initial_delta1_is_one", std::abs(d1 - 1) <= 1e-12, d1 - 1, "|.| <= 1e-12");
  add(out.checks, "initial_lambda_plus_is_one", std::abs(lam.plus - 1) <= 1e-12, lam.plus - 1,
      "|.| <= 1e-12");
  add(out.checks, "initial_lambda_minus", std::abs(lam.minus - (K0 - 1) / (K0 + 1)) <= 1e-12,
      lam.minus, fmt((K0 - 1) / (K0 + 1)));

  const auto st = [&](Branch b) { return init_state(M, out.data.y0, out.data.eta, b); };
  auto pf = make_branch(integrate(st(Branch::Plus), M, Direction::Forward, opts.stops), "plus_forward");
  auto mf = make_branch(integrate(st(Branch::Minus), M, Direction::Forward, opts.stops), "minus_forward");
  check_ring(out, pf, a, 2.0, true);
  check_ring(out, mf, a, 4.0 / 3.0, true);
  check_phi_limit(out, pf, a);

  double worst = 0.0;
  for (std::size_t i = 0; i < pf.path.samples.size(); ++i) {
    const double r = pf.path.samples[i].p.rho;
    worst = std::max(worst, std::abs(pf.path.diagnostics[i].delta2 - (r * r - a * a) / (r * r)));
  }
  add(out.checks, "plus_delta2_closed_form", worst <= 1e-10, worst, "<= 1e-10");

  auto pb = make_branch(integrate(st(Branch::Plus), M, Direction::Backward, opts.stops), "plus_backward");
  pb.classification = classify(pb.path);
  add(out.checks, "plus_backward_escapes", pb.classification == Classification::EscapesToInfinity, 0.0,
      "EscapesToInfinity");

  auto mb = make_branch(integrate(st(Branch::Minus), M, Direction::Backward, quad(opts.stops)),
                        "minus_backward");
  check_spiral(out, mb, 0.999, 3.0);

  out.certificate = kerr_turning_certificate(m, a, rho0);
  add(out.checks, "turning_certificate", out.certificate->holds, out.certificate->delta2_at_ergosphere,
      "delta2-(rho0) > 0 > delta2-(ergosphere)");
  const Event* tp = mb.path.first(EventKind::TurningPoint);
  add(out.checks, "minus_backward_turning_in_band", tp && tp->data > rho0 && tp->data < re,
      tp ? tp->data : 0.0, "in (rho0, ergosphere)");

  out.branches = {std::move(pf), std::move(mf), std::move(pb), std::move(mb)};
  attach_energy(out, opts);
  return out;
}

namespace {

struct AuditResult {
  double worst = std::numeric_limits<double>::infinity();  // min over samples of (lhs−rhs)/scale
  std::size_t n = 0;
};

void audit(AuditResult& r, double lhs, double rhs, double scale) {
  r.worst = std::min(r.worst, (lhs - rhs) / scale);
  ++r.n;
}

}  // namespace

ScenarioOutcome run_kerr_offequatorial(double m, double a, double rho0, double z0,
                                       const ScenarioOptions& opts) {
  require(a < m, "off-equatorial Kerr scenario needs a < m");
  require(z0 > 0 && z0 < 0.1 * m, "off-equatorial scenario needs a small z0 > 0");
  const auto h = *kerr_horizons(m, a);
  const double re = std::sqrt(a * a + 4 * m * m);
  require(rho0 > h.rho_plus && rho0 < re,
          "rho0 must lie in (" + fmt(h.rho_plus) + ", " + fmt(re) + ")");
  ScenarioOutcome out;
  out.id = "kerr-offequatorial";
  out.model = MetricModel::kerr(m, a);
  out.data = kerr_corotating_data(m, a, rho0, z0);
  const auto& M = out.model;
  const double tol = opts.audit_tolerance;

  for (auto br : {Branch::Plus, Branch::Minus}) {
    auto b = make_branch(integrate(init_state(M, out.data.y0, out.data.eta, br), M, Direction::Forward,
                                   opts.stops),
                         label(br, Direction::Forward));
    b.classification = classify(b.path);
    const auto& p = b.path;
    const std::string L = b.label;
    add(out.checks, L + "_terminates_on_ring", b.classification == Classification::TerminatesOnRing,
        p.events.empty() ? 0.0 : p.events.back().x0, "TerminatesOnRing");
    double zmin = std::numeric_limits<double>::infinity();
    for (const auto& s : p.samples) zmin = std::min(zmin, s.p.z);
    add(out.checks, L + "_z_positive", zmin > 0, zmin, "> 0 throughout");

    // inequality chain inside the inner horizon, where 0 < K b² < 1
    const Event* inner = p.first(EventKind::InnerHorizonCross);
    AuditResult chain_rho, chain_rho_sharp, chain_z, chain_z_sharp;
    std::vector<double> dl, d1, rate;
    bool funnel_monotone = true;
    double c_min = std::numeric_limits<double>::infinity();
    const double pw = br == Branch::Plus ? 0.75 : 0.25;
    for (std::size_t i = 0; inner && i + 1 < p.samples.size(); ++i) {
      const auto& s = p.samples[i];
      const auto& d = p.diagnostics[i];
      if (s.x0 < inner->x0) continue;
      const auto sym = detail::symbol<double>(M, s.p.rho, s.p.z, false, false);
      const double K = sym.K, brh = sym.b[0], bph = sym.b[1], bz = sym.b[2];
      const double q = s.xi.xi_phi / s.p.rho;
      const double xi2 = s.xi.xi0 * s.xi.xi0 + s.xi.xi_rho * s.xi.xi_rho + q * q + s.xi.xi_z * s.xi.xi_z;
      const double scale = 1.0 + (1.0 + K) * xi2;
      const double kr = K * brh * brh, kz = K * bz * bz;
      if (kr > 0 && kr < 1) {
        const double eps = std::sqrt(kr / (1 - kr));
        const double P = std::abs(-s.xi.xi0 + bph * q + bz * s.xi.xi_z);
        const double I = std::abs(eps * std::sqrt(K) * P - std::sqrt(K) / eps * std::abs(brh) * std::abs(s.xi.xi_rho));
        audit(chain_rho, d.delta2, I * I, scale);
        audit(chain_rho_sharp, d.delta2, (1 - kr) * I * I, scale);
      }
      if (kz > 0 && kz < 1) {
        const double eps = std::sqrt(kz / (1 - kz));
        const double P = std::abs(-s.xi.xi0 + bph * q + brh * s.xi.xi_rho);
        const double I = std::abs(eps * std::sqrt(K) * P - std::sqrt(K) / eps * std::abs(bz) * std::abs(s.xi.xi_z));
        audit(chain_z, d.delta3, I * I, scale);
        audit(chain_z_sharp, d.delta3, (1 - kz) * I * I, scale);
      }
      const double del = std::abs(s.p.rho - a) + std::abs(s.p.z);
      if (del < 1e-2) {
        const double dd = std::copysign(1.0, s.p.rho - a) * d.drho_dx0 + std::copysign(1.0, s.p.z) * d.dz_dx0;
        if (!(dd < 0)) funnel_monotone = false;
        c_min = std::min(c_min, -dd / std::pow(del, pw));
        dl.push_back(del);
        d1.push_back(d.delta1);
        rate.push_back(-dd);
      }
    }
    const std::string I_rho = br == Branch::Plus ? "I1" : "I3";
    const std::string I_z = br == Branch::Plus ? "I2" : "I4";
    const auto rec = [&](const std::string& name, const AuditResult& r) {
      add(out.checks, L + "_audit_" + name, r.n > 0 && r.worst >= -tol, r.worst,
          ">= -" + fmt(tol) + " (scaled)");
    };
    rec("delta2_ge_" + I_rho + "sq", chain_rho);
    rec("delta2_ge_1mKbrho2_" + I_rho + "sq", chain_rho_sharp);
    rec("delta3_ge_" + I_z + "sq", chain_z);
    rec("delta3_ge_1mKbz2_" + I_z + "sq", chain_z_sharp);
    add(out.checks, L + "_funnel_decreasing", !dl.empty() && funnel_monotone && c_min > 0, c_min,
        "d delta/dx0 <= -c delta^" + fmt(pw) + " with c > 0");
    if (dl.size() >= 3) {
      if (br == Branch::Minus) {
        auto f = fit_power_law(dl, d1);
        b.fits.push_back(f);
        add(out.checks, L + "_delta1_vs_delta_slope", std::abs(f.param("exponent") + 1) <= 0.15,
            f.param("exponent"), "-1 +- 0.15");
      } else {
        std::vector<double> dev;
        for (double v : d1) dev.push_back(v - 1.0);
        b.fits.push_back(fit_power_law(dl, dev));
      }
      b.fits.push_back(fit_power_law(dl, rate));
    }
    out.branches.push_back(std::move(b));
  }
  if (opts.strict_audit) {
    for (const auto& c : out.checks)
      if (c.name.find("_audit_") != std::string::npos && !c.passed)
        throw AuditViolation(c.name + " violated: " + fmt(c.value));
  }
  return out;
}

ScenarioOutcome run_kerr_extremal_and_naked(double m, double a, double rho0,
                                            const ScenarioOptions& opts) {
  require(a >= m, "extremal/naked scenario needs a >= m");
  if (!(rho0 > 0)) rho0 = kerr_naked_default_rho0(m, a);
  ScenarioOutcome out;
  out.model = MetricModel::kerr(m, a);
  const auto& M = out.model;
  require(rho0 > a && region_classify(M, {rho0, 0.0, 0.0}) == Region::Ergoregion,
          "rho0 must lie in the ergoregion (" + fmt(a) + ", " + fmt(ergosphere_radius(M)) + ")");
  const bool extremal = a == m;
  out.id = extremal ? "kerr-extremal" : "kerr-naked";
  out.data = kerr_corotating_data(m, a, rho0);
  const auto st = [&](Branch b) { return init_state(M, out.data.y0, out.data.eta, b); };

  auto pf = make_branch(integrate(st(Branch::Plus), M, Direction::Forward, opts.stops), "plus_forward");
  auto mf = make_branch(integrate(st(Branch::Minus), M, Direction::Forward, opts.stops), "minus_forward");
  for (auto* b : {&pf, &mf}) {
    b->classification = classify(b->path);
    add(out.checks, b->label + "_terminates_on_ring",
        b->classification == Classification::TerminatesOnRing, 0.0, "TerminatesOnRing");
  }
  auto pb = make_branch(integrate(st(Branch::Plus), M, Direction::Backward, opts.stops), "plus_backward");
  pb.classification = classify(pb.path);
  add(out.checks, "plus_backward_escapes", pb.classification == Classification::EscapesToInfinity ||
                                               pb.classification == Classification::TurnsThenEscapes,
      0.0, "escapes");

  if (extremal) {
    auto mb = make_branch(integrate(st(Branch::Minus), M, Direction::Backward, opts.stops), "minus_backward");
    const auto& p = mb.path;
    const double x_far = -opts.stops.max_x0, x_near = x_far / 10.0;
    std::vector<double> x, g;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
      const double x0 = p.samples[i].x0;
      if (x0 > x_near || x0 < x_far) continue;
      const double gap = p.diagnostics[i].horizon_gap;
      x.push_back(x0);
      g.push_back(gap);
      lo = std::min(lo, gap * std::abs(x0));
      hi = std::max(hi, gap * std::abs(x0));
    }
    const bool have = x.size() >= 3 && lo > 0;
    add(out.checks, "minus_backward_product_band", have && hi / lo <= 3.0, have ? hi / lo : 0.0,
        "max/min of (rho-rho_h)|x0| <= 3 over the last decade");
    if (have) {
      auto f = fit_one_over_x0(x, g);
      mb.fits.push_back(f);
      add(out.checks, "minus_backward_one_over_x0_r2", f.r2 > 0.99, f.r2, "> 0.99");
      mb.classification = classify(p, &f);
    } else {
      mb.classification = Classification::Unresolved;
    }
    out.branches = {std::move(pf), std::move(mf), std::move(pb), std::move(mb)};
  } else {
    out.certificate = kerr_turning_certificate(m, a, rho0);
    add(out.checks, "turning_certificate", out.certificate->holds, out.certificate->delta2_at_ergosphere,
        "delta2-(rho0) > 0 > delta2-(ergosphere)");
    auto mb = make_branch(integrate(st(Branch::Minus), M, Direction::Backward, opts.stops), "minus_backward");
    add(out.checks, "minus_backward_turns", mb.path.count(EventKind::TurningPoint) >= 1, 0.0,
        "turning point");
    check_ring(out, mb, a, 4.0 / 3.0, false);
    check_phi_limit(out, mb, a);

    // winding near r = m grows as a decreases toward m
    double prev = -1.0;
    bool monotone = true;
    for (std::size_t k = 0; k < opts.winding_spins.size(); ++k) {
      const double ak = opts.winding_spins[k];
      const auto Mk = MetricModel::kerr(m, ak);
      const auto dk = kerr_corotating_data(m, ak, kerr_naked_default_rho0(m, ak));
      const auto pk = integrate(init_state(Mk, dk.y0, dk.eta, Branch::Minus), Mk, Direction::Backward,
                                opts.stops);
      const double w = naked_winding_turns(pk, m, ak);
      add(out.checks, "winding_a_" + fmt(ak), true, w, "reported");
      if (k < opts.winding_monotone_count) {
        if (k > 0 && !(w > prev)) monotone = false;
        prev = w;
      }
    }
    add(out.checks, "winding_monotone_as_a_decreases", monotone, prev, "strictly increasing");
    out.branches = {std::move(pf), std::move(mf), std::move(pb), std::move(mb)};
  }
  attach_energy(out, opts);
  return out;
}

BumpSpec default_bump(const MetricModel& model, const SpatialPoint& y0) {
  BumpSpec b;
  b.center = y0;
  if (model.kind == MetricKind::Kerr)
    b.halfwidths = {0.02, 0.05, 0.02};
  else
    b.halfwidths = {0.05, 0.05, 0.05};
  return b;
}

ScenarioOutcome run_trajectories(const MetricModel& model, const InitialData& data,
                                 const std::vector<Branch>& branches,
                                 const std::vector<Direction>& directions,
                                 const ScenarioOptions& opts) {
  model.validate();
  ScenarioOutcome out;
  out.id = "trajectories";
  out.model = model;
  out.data = data;
  std::vector<BatchItem> items;
  std::vector<std::pair<Branch, Direction>> keys;
  for (auto br : branches)
    for (auto dir : directions) {
      items.push_back({init_state(model, data.y0, data.eta, br), model, dir, opts.stops});
      keys.emplace_back(br, dir);
    }
  auto results = integrate_batch(items);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].path) throw Error(label(keys[i].first, keys[i].second) + ": " + results[i].error);
    auto b = make_branch(std::move(*results[i].path), label(keys[i].first, keys[i].second));
    const auto k = b.path.events.back().kind;
    if (k == EventKind::ApproachTruncation || k == EventKind::MaxTime) {
      try {
        const Fit f = fit_spiral(b, sign(b.direction));
        b.classification = classify(b.path, &f);
      } catch (const Error&) {  // no horizon gap to fit
        b.classification = classify(b.path);
      }
    } else {
      b.classification = classify(b.path);
    }
    out.branches.push_back(std::move(b));
  }
  attach_energy(out, opts);
  return out;
}

}  // namespace superrad
