#include "superrad/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/multiprecision/float128.hpp>

#include "superrad/detail/symbol.hpp"
#include "superrad/errors.hpp"

namespace superrad {

const char* to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }
const char* to_string(Precision p) { return p == Precision::Double ? "double" : "quad"; }

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::ErgosphereCross: return "ErgosphereCross";
    case EventKind::OuterHorizonCross: return "OuterHorizonCross";
    case EventKind::InnerHorizonCross: return "InnerHorizonCross";
    case EventKind::TurningPoint: return "TurningPoint";
    case EventKind::Escape: return "Escape";
    case EventKind::RingTermination: return "RingTermination";
    case EventKind::CenterTermination: return "CenterTermination";
    case EventKind::MaxTime: return "MaxTime";
    case EventKind::ApproachTruncation: return "ApproachTruncation";
    case EventKind::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

bool is_terminal(EventKind k) {
  switch (k) {
    case EventKind::Escape:
    case EventKind::RingTermination:
    case EventKind::CenterTermination:
    case EventKind::MaxTime:
    case EventKind::ApproachTruncation:
    case EventKind::NumericalFailure:
      return true;
    default:
      return false;
  }
}

std::array<double, 8> DenseSegment::eval(double th) const {
  std::array<double, 8> y;
  const double t1 = 1.0 - th;
  for (int i = 0; i < 8; ++i)
    y[i] = coef[0][i] + th * (coef[1][i] + t1 * (coef[2][i] + th * (coef[3][i] + t1 * coef[4][i])));
  return y;
}

const Event* GeodesicPath::first(EventKind k) const {
  for (const auto& e : events)
    if (e.kind == k) return &e;
  return nullptr;
}

const Event* GeodesicPath::last(EventKind k) const {
  for (auto it = events.rbegin(); it != events.rend(); ++it)
    if (it->kind == k) return &*it;
  return nullptr;
}

std::size_t GeodesicPath::count(EventKind k) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [k](const Event& e) { return e.kind == k; }));
}

const Event& GeodesicPath::termination() const {
  const bool horizon_stop =
      stops.stop_at_horizon && !events.empty() && events.back().kind == EventKind::OuterHorizonCross;
  if (events.empty() || !(is_terminal(events.back().kind) || horizon_stop))
    throw Error("path has no terminal event");
  return events.back();
}

std::size_t GeodesicPath::index_at_x0(double x0) const {
  const int d = sign(direction);
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (d * (samples[i].x0 - x0) >= 0.0) return i;
  return samples.size();
}

std::optional<PhaseState> GeodesicPath::state_at_x0(double x0) const {
  const int d = sign(direction);
  for (const auto& seg : segments) {
    const auto y0 = seg.eval(0.0);
    const auto y1 = seg.eval(seg.theta_end);
    if (d * (x0 - y0[0]) < 0.0 || d * (x0 - y1[0]) > 0.0) continue;
    auto f = [&](double th) { return seg.eval(th)[0] - x0; };
    double lo = 0.0, hi = seg.theta_end;
    double flo = f(lo), fhi = f(hi);
    double th = lo;
    if (flo == 0.0) {
      th = lo;
    } else if (fhi == 0.0) {
      th = hi;
    } else {
      boost::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                 boost::math::tools::eps_tolerance<double>(52),
                                                 iters);
      th = 0.5 * (r.first + r.second);
    }
    const auto y = seg.eval(th);
    PhaseState st;
    st.s = seg.s0 + th * seg.h;
    st.x0 = y[0];
    st.p = {y[1], y[2], y[3]};
    st.xi = {y[4], y[5], y[6], y[7]};
    return st;
  }
  return std::nullopt;
}

PhaseState init_state(const MetricModel& model, const SpatialPoint& y0,
                      const SpatialCovector& eta, Branch branch) {
  const auto lam = lambda_roots(model, y0, eta);
  PhaseState st;
  st.p = y0;
  st.xi = {lam.of(branch), eta[0], eta[1], eta[2]};
  if (scaled_residual(model, st) >= 1e-12)
    throw DomainError("initial null condition not satisfied");
  return st;
}

double scaled_residual(const MetricModel& model, const PhaseState& st) {
  const double H = eval_H(model, st.p, st.xi);
  const double q = st.xi.xi_phi / st.p.rho;
  const double n2 = st.xi.xi0 * st.xi.xi0 + st.xi.xi_rho * st.xi.xi_rho + q * q +
                    st.xi.xi_z * st.xi.xi_z;
  return std::abs(H) / (1.0 + n2);
}

double drho_dx0(const PhaseState& st, const MetricModel& model) {
  const auto g = grad_H(model, st.p, st.xi);
  if (std::abs(g.xi0) < 1e-12) throw HorizonQuotient("dρ/dx₀: ∂H/∂ξ₀ vanishes");
  return g.xi_rho / g.xi0;
}

MetricModel time_reverse(const MetricModel& model) {
  if (model.kind != MetricKind::Acoustic) throw DomainError("time_reverse: acoustic model required");
  return MetricModel::acoustic(-model.A, -model.B);
}

namespace {

using quad = boost::multiprecision::float128;

template <class R>
using Y = std::array<R, 8>;

enum : int { X0 = 0, RHO, PHI, Z, XI0, XR, XP, XZ };

struct StageFailure {};

// Dormand–Prince 5(4) tableau with Hairer's dense-output weights.
template <class R>
struct Tableau {
  static R q(long n, long d) { return R(n) / R(d); }
  const R c2 = q(1, 5), c3 = q(3, 10), c4 = q(4, 5), c5 = q(8, 9);
  const R a21 = q(1, 5);
  const R a31 = q(3, 40), a32 = q(9, 40);
  const R a41 = q(44, 45), a42 = q(-56, 15), a43 = q(32, 9);
  const R a51 = q(19372, 6561), a52 = q(-25360, 2187), a53 = q(64448, 6561), a54 = q(-212, 729);
  const R a61 = q(9017, 3168), a62 = q(-355, 33), a63 = q(46732, 5247), a64 = q(49, 176),
          a65 = q(-5103, 18656);
  const R a71 = q(35, 384), a73 = q(500, 1113), a74 = q(125, 192), a75 = q(-2187, 6784),
          a76 = q(11, 84);
  const R e1 = q(71, 57600), e3 = q(-71, 16695), e4 = q(71, 1920), e5 = q(-17253, 339200),
          e6 = q(22, 525), e7 = q(-1, 40);
  const R d1 = q(-12715105075L, 11282082432L), d3 = q(87487479700L, 32700410799L),
          d4 = q(-10690763975L, 1880347072L), d5 = q(701980252875L, 199316789632L),
          d6 = q(-1453857185L, 822651844L), d7 = q(69997945L, 29380423L);
};

template <class R>
bool finite(const R& v) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(v);
}

template <class R>
double to_d(const R& v) {
  return static_cast<double>(v);
}

struct EventDef {
  EventKind kind;
  int crossing;  // +1 upward only, −1 downward only, 0 either
};

template <class R>
class Engine {
 public:
  Engine(const MetricModel& model, Direction dir, const StopSpec& stops, R rho0)
      : model_(model), dir_(dir), stops_(stops), rho0_(rho0) {
    if (model.kind == MetricKind::Kerr) {
      if (auto h = kerr_horizons(model.m, model.a)) {
        horizons_ = true;
        r_plus_ = R(model.m) + sqrt_r(R(model.m) * R(model.m) - R(model.a) * R(model.a));
        r_minus_ = R(model.m) - sqrt_r(R(model.m) * R(model.m) - R(model.a) * R(model.a));
        if (!(model.a < model.m)) r_minus_ = r_plus_ = R(model.m);
      }
    } else if (model.kind == MetricKind::Acoustic && model.A != 0.0) {
      horizons_ = true;
    }
    defs_.push_back({EventKind::ErgosphereCross, 0});
    if (horizons_) defs_.push_back({EventKind::OuterHorizonCross, 0});
    if (model.kind == MetricKind::Kerr && model.a < model.m)
      defs_.push_back({EventKind::InnerHorizonCross, 0});
    defs_.push_back({EventKind::TurningPoint, 0});
    defs_.push_back({EventKind::Escape, +1});
    if (model.kind == MetricKind::Kerr && model.a > 0.0)
      defs_.push_back({EventKind::RingTermination, -1});
    if (model.kind != MetricKind::Kerr) defs_.push_back({EventKind::CenterTermination, -1});
    defs_.push_back({EventKind::MaxTime, +1});
    escape_ = stops.escape_radius > 0.0 ? R(stops.escape_radius) : R(stops.escape_factor) * rho0;
  }

  static R sqrt_r(R v) {
    using std::sqrt;
    return sqrt(v);
  }

  void set_sigma(R sigma) { sigma_ = sigma; }

  Y<R> rhs(const Y<R>& y) const {
    if (!(y[RHO] > 0)) throw StageFailure{};
    detail::Symbol<R> s;
    try {
      s = detail::symbol<R>(model_, y[RHO], y[Z], true, false);
    } catch (const Error&) {
      throw StageFailure{};
    }
    const auto g = detail::gradient(s, y[RHO], y[XI0], y[XR], y[XP], y[XZ]);
    Y<R> f = {sigma_ * g.xi0, sigma_ * g.xi_rho, sigma_ * g.xi_phi, sigma_ * g.xi_z,
              R(0),           -sigma_ * g.rho,   R(0),            -sigma_ * g.z};
    for (const auto& v : f)
      if (!finite(v)) throw StageFailure{};
    return f;
  }

  // Event function values; throws StageFailure where the metric cannot be evaluated.
  std::vector<R> event_values(const Y<R>& y) const {
    if (!(y[RHO] > 0)) throw StageFailure{};
    detail::Symbol<R> s;
    try {
      s = detail::symbol<R>(model_, y[RHO], y[Z], true, false);
    } catch (const Error&) {
      throw StageFailure{};
    }
    std::vector<R> v;
    v.reserve(defs_.size());
    for (const auto& d : defs_) v.push_back(value(d.kind, y, s));
    return v;
  }

  R value(EventKind k, const Y<R>& y, const detail::Symbol<R>& s) const {
    using std::abs;
    switch (k) {
      case EventKind::ErgosphereCross:
        return s.K - 1;
      case EventKind::OuterHorizonCross:
        return model_.kind == MetricKind::Kerr ? s.r - r_plus_ : y[RHO] - R(std::abs(model_.A));
      case EventKind::InnerHorizonCross:
        return s.r - r_minus_;
      case EventKind::TurningPoint: {
        const auto g = detail::gradient(s, y[RHO], y[XI0], y[XR], y[XP], y[XZ]);
        return sigma_ * g.xi_rho;
      }
      case EventKind::Escape:
        return y[RHO] - escape_;
      case EventKind::RingTermination: {
        const R a = model_.a;
        const R dr = y[RHO] - a;
        return dr * dr + y[Z] * y[Z] - R(stops_.ring_tol) * a * a;
      }
      case EventKind::CenterTermination:
        return y[RHO] - R(stops_.center_tol) * rho0_;
      case EventKind::MaxTime:
        return R(sign(dir_)) * y[X0] - R(stops_.max_x0);
      default:
        return R(0);
    }
  }

  double event_data(EventKind k, const Y<R>& y) const {
    switch (k) {
      case EventKind::ErgosphereCross:
      case EventKind::OuterHorizonCross:
      case EventKind::InnerHorizonCross: {
        const auto s = detail::symbol<R>(model_, y[RHO], y[Z], true, false);
        const auto g = detail::gradient(s, y[RHO], y[XI0], y[XR], y[XP], y[XZ]);
        return to_d(g.xi_rho / g.xi0);
      }
      case EventKind::TurningPoint:
      case EventKind::Escape:
      case EventKind::CenterTermination:
        return to_d(y[RHO]);
      case EventKind::RingTermination: {
        const R dr = y[RHO] - R(model_.a);
        return to_d(dr * dr + y[Z] * y[Z]);
      }
      case EventKind::MaxTime:
        return to_d(y[X0]);
      default:
        return 0.0;
    }
  }

  // Relative distance to the nearest horizon, used by the approach monitor.
  bool horizon_gap(const Y<R>& y, const detail::Symbol<R>& s, R& rel, R& rho_gap) const {
    using std::abs;
    using std::sqrt;
    if (!horizons_) return false;
    if (model_.kind == MetricKind::Acoustic) {
      const R h = abs(R(model_.A));
      rho_gap = y[RHO] - h;
      rel = abs(rho_gap) / h;
      return true;
    }
    const R a = model_.a;
    const R rh = abs(s.r - r_plus_) <= abs(s.r - r_minus_) ? r_plus_ : r_minus_;
    rel = abs(s.r - rh) / rh;
    rho_gap = y[RHO] - sqrt(a * a + rh * rh);
    return true;
  }

  const std::vector<EventDef>& defs() const { return defs_; }
  bool terminal(EventKind k) const {
    return is_terminal(k) || (stops_.stop_at_horizon && k == EventKind::OuterHorizonCross);
  }

 private:
  const MetricModel& model_;
  Direction dir_;
  StopSpec stops_;
  R rho0_;
  R sigma_{1};
  R escape_{};
  bool horizons_ = false;
  R r_plus_{}, r_minus_{};
  std::vector<EventDef> defs_;
};

template <class R>
PhaseState to_state(R s, const Y<R>& y) {
  PhaseState st;
  st.s = to_d(s);
  st.x0 = to_d(y[X0]);
  st.p = {to_d(y[RHO]), to_d(y[PHI]), to_d(y[Z])};
  st.xi = {to_d(y[XI0]), to_d(y[XR]), to_d(y[XP]), to_d(y[XZ])};
  return st;
}

template <class R>
R xi_norm2(const Y<R>& y) {
  const R q = y[XP] / y[RHO];
  return y[XI0] * y[XI0] + y[XR] * y[XR] + q * q + y[XZ] * y[XZ];
}

template <class R>
GeodesicPath run(const PhaseState& st, const MetricModel& model, Direction dir,
                 const StopSpec& stops) {
  using std::abs;
  using std::log;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  const Tableau<R> T;
  GeodesicPath path;
  path.model = model;
  path.direction = dir;
  path.stops = stops;
  path.rho0 = st.p.rho;

  Y<R> y = {R(st.x0), R(st.p.rho), R(st.p.phi), R(st.p.z),
            R(st.xi.xi0), R(st.xi.xi_rho), R(st.xi.xi_phi), R(st.xi.xi_z)};
  R s = st.s;
  const R rtol = stops.rtol, atol = stops.atol;

  Engine<R> eng(model, dir, stops, R(st.p.rho));
  {
    const auto sym = detail::symbol<R>(model, y[RHO], y[Z], true, false);
    const auto g = detail::gradient(sym, y[RHO], y[XI0], y[XR], y[XP], y[XZ]);
    if (g.xi0 == 0) throw DomainError("integrate: ∂H/∂ξ₀ vanishes at the initial state");
    path.branch = g.xi0 > 0 ? Branch::Plus : Branch::Minus;
    eng.set_sigma(R(g.xi0 > 0 ? 1 : -1) * R(sign(dir)));
  }

  auto add_event = [&](EventKind k, R se, const Y<R>& ye, double data, std::string note = {}) {
    Event e;
    e.kind = k;
    e.s = to_d(se);
    e.x0 = to_d(ye[X0]);
    e.location = {to_d(ye[RHO]), to_d(ye[PHI]), to_d(ye[Z])};
    e.data = data;
    e.note = std::move(note);
    path.events.push_back(std::move(e));
  };

  // approach monitor state
  bool run_active = false;
  R prev_gap = 0, ref_gap = 0, prev_x0 = 0, ref_x0 = 0;
  bool have_prev_gap = false;
  const R gap_floor = std::is_same_v<R, double> ? R(1e-12) : R(1e-30);

  auto diagnose = [&](const Y<R>& ye, const detail::Symbol<R>& sym, R rho_gap) {
    SampleDiagnostics d;
    d.H_residual = to_d(detail::hamiltonian(sym, ye[RHO], ye[XI0], ye[XR], ye[XP], ye[XZ]));
    d.delta1 = to_d(detail::delta1(sym, ye[RHO], ye[XR], ye[XP], ye[XZ]));
    d.delta2 = to_d(detail::delta2(model, sym, ye[RHO], ye[XI0], ye[XP], ye[XZ]));
    d.delta3 = to_d(detail::delta3(model, sym, ye[RHO], ye[XI0], ye[XR], ye[XP]));
    d.region = region_from_fields(
        model, to_d(ye[RHO]),
        {to_d(sym.K), to_d(sym.b[0]), to_d(sym.b[1]), to_d(sym.b[2]), to_d(sym.r)});
    d.horizon_gap = to_d(rho_gap);
    const auto g = detail::gradient(sym, ye[RHO], ye[XI0], ye[XR], ye[XP], ye[XZ]);
    d.drho_dx0 = to_d(g.xi_rho / g.xi0);
    d.dz_dx0 = to_d(g.xi_z / g.xi0);
    return d;
  };

  // Records the sample; returns a terminal event kind if a per-sample check fires.
  auto record = [&](R se, const Y<R>& ye) -> std::optional<EventKind> {
    path.samples.push_back(to_state(se, ye));
    SampleDiagnostics d;
    detail::Symbol<R> sym;
    try {
      sym = detail::symbol<R>(model, ye[RHO], ye[Z], true, false);
    } catch (const Error& err) {
      path.diagnostics.push_back(d);
      add_event(EventKind::NumericalFailure, se, ye, 0.0, err.what());
      return EventKind::NumericalFailure;
    }
    R rel = 0, rho_gap = 0;
    const bool has_gap = eng.horizon_gap(ye, sym, rel, rho_gap);
    path.diagnostics.push_back(diagnose(ye, sym, rho_gap));

    for (const auto& v : ye)
      if (!finite(v)) {
        add_event(EventKind::NumericalFailure, se, ye, 0.0, "non-finite state");
        return EventKind::NumericalFailure;
      }
    const R H = detail::hamiltonian(sym, ye[RHO], ye[XI0], ye[XR], ye[XP], ye[XZ]);
    const R scaled = abs(H) / (1 + xi_norm2(ye));
    if (!(scaled <= R(stops.h_tol))) {
      add_event(EventKind::NumericalFailure, se, ye, to_d(scaled), "H residual above tolerance");
      return EventKind::NumericalFailure;
    }
    if (has_gap) {
      if (have_prev_gap && rel < prev_gap) {
        if (!run_active) {
          run_active = true;
          ref_gap = prev_gap;
          ref_x0 = prev_x0;
        }
      } else {
        run_active = false;
      }
      have_prev_gap = true;
      prev_gap = rel;
      prev_x0 = ye[X0];
      if (run_active && rel > 0) {
        const R depth = log(ref_gap / rel);
        const R span = abs(ye[X0] - ref_x0);
        const double rate = span > 0 ? to_d(depth / span) : 0.0;
        if (depth >= R(stops.approach_depth)) {
          add_event(EventKind::ApproachTruncation, se, ye, rate, "e-fold depth reached");
          return EventKind::ApproachTruncation;
        }
        if (rel < gap_floor) {
          add_event(EventKind::ApproachTruncation, se, ye, rate, "gap at precision floor");
          return EventKind::ApproachTruncation;
        }
      }
    }
    return std::nullopt;
  };

  if (record(s, y)) return path;

  std::vector<R> gprev;
  try {
    gprev = eng.event_values(y);
    auto f0 = eng.rhs(y);
    (void)f0;
  } catch (const StageFailure&) {
    add_event(EventKind::NumericalFailure, s, y, 0.0, "metric not evaluable at the initial state");
    return path;
  }

  // Initial step (Hairer's heuristic).
  Y<R> k1 = eng.rhs(y);
  R h;
  {
    R dnf = 0, dny = 0;
    for (int i = 0; i < 8; ++i) {
      const R sk = atol + rtol * abs(y[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    h = (dnf <= R(1e-10) || dny <= R(1e-10)) ? R(1e-6) : sqrt(dny / dnf) * R(0.01);
    Y<R> y1;
    for (int i = 0; i < 8; ++i) y1[i] = y[i] + h * k1[i];
    R der2 = 0;
    try {
      const auto f1 = eng.rhs(y1);
      for (int i = 0; i < 8; ++i) {
        const R sk = atol + rtol * abs(y[i]);
        der2 += ((f1[i] - k1[i]) / sk) * ((f1[i] - k1[i]) / sk);
      }
      der2 = sqrt(der2) / h;
    } catch (const StageFailure&) {
      der2 = 0;
    }
    const R der12 = max(abs(der2), sqrt(dnf));
    const R h1 = der12 <= R(1e-15) ? max(R(1e-6), h * R(1e-3)) : pow(R(0.01) / der12, R(0.2));
    h = min(R(100) * h, h1);
  }

  const R beta = R(0.04), expo1 = R(0.2) - beta * R(0.75), safe = R(0.9);
  const R facc1 = R(5), facc2 = R(0.1);
  R facold = R(1e-4);
  bool last_rejected = false;
  const R eps = std::numeric_limits<R>::epsilon();
  std::size_t steps = 0;

  while (true) {
    if (steps++ >= stops.max_steps) {
      add_event(EventKind::NumericalFailure, s, y, 0.0, "step limit reached");
      return path;
    }
    if (!(h > 4 * eps * max(abs(s), R(1e-300)))) {
      // The affine parameter converges while x₀ runs off during a horizon approach; running
      // out of resolution in s there is the same asymptotic regime, not a failure.
      if (run_active && prev_gap > 0 && log(ref_gap / prev_gap) >= 10) {
        const R span = abs(y[X0] - ref_x0);
        add_event(EventKind::ApproachTruncation, s, y,
                  span > 0 ? to_d(log(ref_gap / prev_gap) / span) : 0.0,
                  "affine parameter resolution reached");
        return path;
      }
      add_event(EventKind::NumericalFailure, s, y, 0.0, "step size underflow");
      return path;
    }

    Y<R> k2, k3, k4, k5, k6, k7, ynew, ys;
    bool ok = true;
    try {
      for (int i = 0; i < 8; ++i) ys[i] = y[i] + h * T.a21 * k1[i];
      k2 = eng.rhs(ys);
      for (int i = 0; i < 8; ++i) ys[i] = y[i] + h * (T.a31 * k1[i] + T.a32 * k2[i]);
      k3 = eng.rhs(ys);
      for (int i = 0; i < 8; ++i) ys[i] = y[i] + h * (T.a41 * k1[i] + T.a42 * k2[i] + T.a43 * k3[i]);
      k4 = eng.rhs(ys);
      for (int i = 0; i < 8; ++i)
        ys[i] = y[i] + h * (T.a51 * k1[i] + T.a52 * k2[i] + T.a53 * k3[i] + T.a54 * k4[i]);
      k5 = eng.rhs(ys);
      for (int i = 0; i < 8; ++i)
        ys[i] = y[i] + h * (T.a61 * k1[i] + T.a62 * k2[i] + T.a63 * k3[i] + T.a64 * k4[i] +
                            T.a65 * k5[i]);
      k6 = eng.rhs(ys);
      for (int i = 0; i < 8; ++i)
        ynew[i] = y[i] + h * (T.a71 * k1[i] + T.a73 * k3[i] + T.a74 * k4[i] + T.a75 * k5[i] +
                              T.a76 * k6[i]);
      k7 = eng.rhs(ynew);
    } catch (const StageFailure&) {
      ok = false;
    }
    if (!ok) {
      ++path.rejected_steps;
      h *= R(0.25);
      last_rejected = true;
      continue;
    }

    R err = 0;
    for (int i = 0; i < 8; ++i) {
      const R e = h * (T.e1 * k1[i] + T.e3 * k3[i] + T.e4 * k4[i] + T.e5 * k5[i] + T.e6 * k6[i] +
                       T.e7 * k7[i]);
      const R sk = atol + rtol * max(abs(y[i]), abs(ynew[i]));
      err += (e / sk) * (e / sk);
    }
    err = sqrt(err / 8);
    const R fac11 = pow(err, expo1);

    if (!(err <= 1)) {
      ++path.rejected_steps;
      h = h / min(facc1, fac11 / safe);
      last_rejected = true;
      continue;
    }

    // Dense output over the accepted step.
    std::array<Y<R>, 5> rc;
    for (int i = 0; i < 8; ++i) {
      const R ydiff = ynew[i] - y[i];
      const R bspl = h * k1[i] - ydiff;
      rc[0][i] = y[i];
      rc[1][i] = ydiff;
      rc[2][i] = bspl;
      rc[3][i] = ydiff - h * k7[i] - bspl;
      rc[4][i] = h * (T.d1 * k1[i] + T.d3 * k3[i] + T.d4 * k4[i] + T.d5 * k5[i] + T.d6 * k6[i] +
                      T.d7 * k7[i]);
    }
    auto dense = [&](R th) {
      Y<R> out;
      const R t1 = 1 - th;
      for (int i = 0; i < 8; ++i)
        out[i] = rc[0][i] + th * (rc[1][i] + t1 * (rc[2][i] + th * (rc[3][i] + t1 * rc[4][i])));
      return out;
    };

    // Locate sign changes of the event functions inside the step.
    std::vector<R> gnew;
    try {
      gnew = eng.event_values(ynew);
    } catch (const StageFailure&) {
      ++path.rejected_steps;
      h *= R(0.25);
      last_rejected = true;
      continue;
    }
    struct Hit {
      R theta;
      EventKind kind;
    };
    std::vector<Hit> hits;
    const auto& defs = eng.defs();
    for (std::size_t j = 0; j < defs.size(); ++j) {
      const R g0 = gprev[j], g1 = gnew[j];
      if (g0 == 0 || (g0 < 0) == (g1 < 0)) continue;
      if (defs[j].crossing > 0 && !(g0 < 0)) continue;
      if (defs[j].crossing < 0 && !(g0 > 0)) continue;
      R th = 1;
      if (g1 != 0) {
        auto gf = [&](R t) -> R {
          const auto yt = dense(t);
          try {
            const auto sym = detail::symbol<R>(model, yt[RHO], yt[Z], true, false);
            return eng.value(defs[j].kind, yt, sym);
          } catch (const Error&) {
            return g1;
          }
        };
        boost::uintmax_t iters = 100;
        const auto r = boost::math::tools::toms748_solve(
            gf, R(0), R(1), g0, g1,
            boost::math::tools::eps_tolerance<R>(std::numeric_limits<R>::digits - 3), iters);
        th = (r.first + r.second) / 2;
      }
      hits.push_back({th, defs[j].kind});
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Hit& a, const Hit& b) { return a.theta < b.theta; });
    R theta_end = 1;
    std::optional<EventKind> stop;
    for (const auto& hit : hits) {
      const auto ye = dense(hit.theta);
      double data = 0.0;
      try {
        data = eng.event_data(hit.kind, ye);
      } catch (const Error&) {
      }
      add_event(hit.kind, s + hit.theta * h, ye, data);
      if (eng.terminal(hit.kind)) {
        theta_end = hit.theta;
        stop = hit.kind;
        break;
      }
    }

    if (stops.dense) {
      DenseSegment seg;
      seg.s0 = to_d(s);
      seg.h = to_d(h);
      seg.theta_end = to_d(theta_end);
      for (int c = 0; c < 5; ++c)
        for (int i = 0; i < 8; ++i) seg.coef[c][i] = to_d(rc[c][i]);
      path.segments.push_back(seg);
    }

    if (stop) {
      const auto ye = theta_end == 1 ? ynew : dense(theta_end);
      // per-sample checks still run, but the geometric event already ends the path
      path.samples.push_back(to_state(s + theta_end * h, ye));
      SampleDiagnostics d;
      try {
        const auto sym = detail::symbol<R>(model, ye[RHO], ye[Z], true, false);
        R rel = 0, rho_gap = 0;
        eng.horizon_gap(ye, sym, rel, rho_gap);
        d = diagnose(ye, sym, rho_gap);
      } catch (const Error&) {
      }
      path.diagnostics.push_back(d);
      return path;
    }

    s += h;
    y = ynew;
    k1 = k7;
    gprev = std::move(gnew);
    if (record(s, y)) return path;

    R fac = fac11 / pow(facold, beta);
    fac = max(facc2, min(facc1, fac / safe));
    facold = max(err, R(1e-4));
    R hnew = h / fac;
    if (last_rejected) hnew = min(hnew, h);
    last_rejected = false;
    h = hnew;
  }
}

}  // namespace

GeodesicPath integrate(const PhaseState& state, const MetricModel& model, Direction direction,
                       const StopSpec& stops) {
  model.validate();
  if (stops.precision == Precision::Quad) return run<quad>(state, model, direction, stops);
  return run<double>(state, model, direction, stops);
}

}  // namespace superrad
