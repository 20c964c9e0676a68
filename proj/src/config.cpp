#include "superrad/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "superrad/errors.hpp"

namespace superrad {

ConfigError::ConfigError(std::vector<Item> items)
    : Error([&] {
        std::string s = "invalid configuration";
        for (const auto& it : items)
          s += "\n  " + (it.line > 0 ? "line " + std::to_string(it.line) + ": " : std::string()) +
               it.message;
        return s;
      }()),
      items_(std::move(items)) {}

const char* to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "jsonl"; }

namespace {

constexpr std::pair<ScenarioKind, const char*> kScenarioNames[] = {
    {ScenarioKind::Trajectories, "trajectories"},
    {ScenarioKind::AcousticSuperradiant, "acoustic-superradiant"},
    {ScenarioKind::AcousticNaked, "acoustic-naked"},
    {ScenarioKind::AcousticShortlived, "acoustic-shortlived"},
    {ScenarioKind::WhiteHole, "white-hole"},
    {ScenarioKind::KerrEquatorial, "kerr-equatorial"},
    {ScenarioKind::KerrOffEquatorial, "kerr-offequatorial"},
    {ScenarioKind::KerrExtremalNaked, "kerr-extremal-naked"},
};

const char* const kPresets[] = {"eq-4.9", "eq-5.2", "eq-7.5", "remark-4.2"};

// Value errors are thrown as plain strings and attached to a line by the caller.
struct BadValue {
  std::string message;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(std::string_view v) {
  double x = 0.0;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw BadValue{"expected a number, got '" + std::string(v) + "'"};
  if (!std::isfinite(x)) throw BadValue{"value must be finite"};
  return x;
}

std::uint64_t to_uint(std::string_view v) {
  std::uint64_t x = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw BadValue{"expected a non-negative integer, got '" + std::string(v) + "'"};
  return x;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw BadValue{"expected true or false, got '" + std::string(v) + "'"};
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto c = v.find(',');
    const auto item = trim(v.substr(0, c));
    if (item.empty()) throw BadValue{"empty list element"};
    out.push_back(item);
    if (c == std::string_view::npos) break;
    v.remove_prefix(c + 1);
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F f) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + std::string(f(xs[i]));
  return s;
}

SweepSpec& sweep(RunConfig& c) {
  if (!c.sweep) c.sweep.emplace();
  return *c.sweep;
}

struct KeyDef {
  const char* key;
  bool numeric;  // may be swept
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

#define NUM_FIELD(name, expr)                                                          \
  KeyDef {                                                                             \
    name, true, [](RunConfig& c, std::string_view v) { expr = to_double(v); },         \
        [](const RunConfig& c) -> std::optional<std::string> { return num(expr); }     \
  }
#define OPT_NUM_FIELD(name, expr)                                                      \
  KeyDef {                                                                             \
    name, true, [](RunConfig& c, std::string_view v) { expr = to_double(v); },         \
        [](const RunConfig& c) -> std::optional<std::string> {                         \
          if (!expr) return std::nullopt;                                              \
          return num(*expr);                                                           \
        }                                                                              \
  }
#define BOOL_FIELD(name, expr)                                                         \
  KeyDef {                                                                             \
    name, false, [](RunConfig& c, std::string_view v) { expr = to_bool(v); },          \
        [](const RunConfig& c) -> std::optional<std::string> {                         \
          return std::string(expr ? "true" : "false");                                 \
        }                                                                              \
  }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> t = {
      {"scenario", false,
       [](RunConfig& c, std::string_view v) {
         for (auto [k, n] : kScenarioNames)
           if (v == n) {
             c.scenario = k;
             return;
           }
         throw BadValue{"unknown scenario '" + std::string(v) + "'"};
       },
       [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.scenario); }},
      {"metric.kind", false,
       [](RunConfig& c, std::string_view v) {
         if (v == "kerr")
           c.metric.kind = MetricKind::Kerr;
         else if (v == "acoustic")
           c.metric.kind = MetricKind::Acoustic;
         else if (v == "flat")
           c.metric.kind = MetricKind::Flat;
         else
           throw BadValue{"metric.kind must be kerr, acoustic or flat"};
       },
       [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.metric.kind); }},
      NUM_FIELD("metric.A", c.metric.A),
      NUM_FIELD("metric.B", c.metric.B),
      NUM_FIELD("metric.m", c.metric.m),
      NUM_FIELD("metric.a", c.metric.a),
      {"initial.preset", false,
       [](RunConfig& c, std::string_view v) {
         if (std::find(std::begin(kPresets), std::end(kPresets), v) == std::end(kPresets))
           throw BadValue{"unknown preset '" + std::string(v) + "' (eq-4.9, eq-5.2, eq-7.5, remark-4.2)"};
         c.initial.preset = std::string(v);
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (c.initial.preset.empty()) return std::nullopt;
         return c.initial.preset;
       }},
      OPT_NUM_FIELD("initial.rho0", c.initial.rho0),
      NUM_FIELD("initial.phi0", c.initial.phi0),
      NUM_FIELD("initial.z0", c.initial.z0),
      OPT_NUM_FIELD("initial.eta_rho", c.initial.eta_rho),
      OPT_NUM_FIELD("initial.eta_phi", c.initial.eta_phi),
      OPT_NUM_FIELD("initial.eta_z", c.initial.eta_z),
      {"run.branches", false,
       [](RunConfig& c, std::string_view v) {
         c.branches.clear();
         for (auto x : split_list(v)) {
           if (x == "plus")
             c.branches.push_back(Branch::Plus);
           else if (x == "minus")
             c.branches.push_back(Branch::Minus);
           else
             throw BadValue{"branch must be plus or minus, got '" + std::string(x) + "'"};
         }
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         return join(c.branches, [](Branch b) { return to_string(b); });
       }},
      {"run.directions", false,
       [](RunConfig& c, std::string_view v) {
         c.directions.clear();
         for (auto x : split_list(v)) {
           if (x == "forward")
             c.directions.push_back(Direction::Forward);
           else if (x == "backward")
             c.directions.push_back(Direction::Backward);
           else
             throw BadValue{"direction must be forward or backward, got '" + std::string(x) + "'"};
         }
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         return join(c.directions, [](Direction d) { return to_string(d); });
       }},
      NUM_FIELD("stop.escape_factor", c.stops.escape_factor),
      NUM_FIELD("stop.escape_radius", c.stops.escape_radius),
      NUM_FIELD("stop.max_x0", c.stops.max_x0),
      NUM_FIELD("stop.rtol", c.stops.rtol),
      NUM_FIELD("stop.atol", c.stops.atol),
      NUM_FIELD("stop.ring_tol", c.stops.ring_tol),
      NUM_FIELD("stop.center_tol", c.stops.center_tol),
      NUM_FIELD("stop.approach_depth", c.stops.approach_depth),
      NUM_FIELD("stop.h_tol", c.stops.h_tol),
      BOOL_FIELD("stop.at_horizon", c.stops.stop_at_horizon),
      {"stop.max_steps", false,
       [](RunConfig& c, std::string_view v) { c.stops.max_steps = to_uint(v); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.stops.max_steps); }},
      {"stop.precision", false,
       [](RunConfig& c, std::string_view v) {
         if (v == "double")
           c.stops.precision = Precision::Double;
         else if (v == "quad")
           c.stops.precision = Precision::Quad;
         else
           throw BadValue{"stop.precision must be double or quad"};
       },
       [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.stops.precision); }},
      BOOL_FIELD("bump.enabled", c.bump.enabled),
      OPT_NUM_FIELD("bump.halfwidth_rho", c.bump.halfwidth_rho),
      OPT_NUM_FIELD("bump.halfwidth_phi", c.bump.halfwidth_phi),
      OPT_NUM_FIELD("bump.halfwidth_z", c.bump.halfwidth_z),
      NUM_FIELD("bump.normalization", c.bump.normalization),
      {"quadrature.order", false,
       [](RunConfig& c, std::string_view v) { c.quadrature.order = static_cast<int>(to_uint(v)); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.quadrature.order); }},
      {"quadrature.panels", false,
       [](RunConfig& c, std::string_view v) { c.quadrature.panels = static_cast<int>(to_uint(v)); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.quadrature.panels); }},
      {"quadrature.check_order", false,
       [](RunConfig& c, std::string_view v) { c.quadrature.check_order = static_cast<int>(to_uint(v)); },
       [](const RunConfig& c) -> std::optional<std::string> {
         return std::to_string(c.quadrature.check_order);
       }},
      NUM_FIELD("quadrature.tolerance", c.quadrature.tolerance),
      BOOL_FIELD("quadrature.parallel", c.quadrature.parallel),
      {"output.format", false,
       [](RunConfig& c, std::string_view v) {
         if (v == "csv")
           c.format = OutputFormat::Csv;
         else if (v == "jsonl")
           c.format = OutputFormat::Jsonl;
         else
           throw BadValue{"output.format must be csv or jsonl"};
       },
       [](const RunConfig& c) -> std::optional<std::string> { return to_string(c.format); }},
      BOOL_FIELD("output.plot", c.plot),
      {"seed", false, [](RunConfig& c, std::string_view v) { c.seed = to_uint(v); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.seed); }},
      {"sweep.key", false, [](RunConfig& c, std::string_view v) { sweep(c).key = std::string(v); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.sweep) return std::nullopt;
         return c.sweep->key;
       }},
      {"sweep.values", false,
       [](RunConfig& c, std::string_view v) {
         auto& s = sweep(c);
         s.values.clear();
         for (auto x : split_list(v)) s.values.push_back(to_double(x));
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.sweep || c.sweep->values.empty()) return std::nullopt;
         return join(c.sweep->values, num);
       }},
      {"sweep.random", false,
       [](RunConfig& c, std::string_view v) { sweep(c).random = to_uint(v); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.sweep || c.sweep->random == 0) return std::nullopt;
         return std::to_string(c.sweep->random);
       }},
      {"sweep.min", false, [](RunConfig& c, std::string_view v) { sweep(c).min = to_double(v); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.sweep || c.sweep->random == 0) return std::nullopt;
         return num(c.sweep->min);
       }},
      {"sweep.max", false, [](RunConfig& c, std::string_view v) { sweep(c).max = to_double(v); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.sweep || c.sweep->random == 0) return std::nullopt;
         return num(c.sweep->max);
       }},
      BOOL_FIELD("audit.strict", c.strict_audit),
      NUM_FIELD("audit.tolerance", c.audit_tolerance),
  };
  return t;
}

#undef NUM_FIELD
#undef OPT_NUM_FIELD
#undef BOOL_FIELD

const KeyDef* find_key(std::string_view key) {
  for (const auto& k : key_table())
    if (key == k.key) return &k;
  return nullptr;
}

const char* implied_preset(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::AcousticSuperradiant:
    case ScenarioKind::WhiteHole: return "eq-4.9";
    case ScenarioKind::AcousticNaked: return "remark-4.2";
    case ScenarioKind::AcousticShortlived: return "eq-5.2";
    case ScenarioKind::KerrEquatorial:
    case ScenarioKind::KerrOffEquatorial:
    case ScenarioKind::KerrExtremalNaked: return "eq-7.5";
    case ScenarioKind::Trajectories: return "";
  }
  return "";
}

// Cross-field checks on a fully parsed config. `line` maps keys to where they were set.
void validate(const RunConfig& c, const std::map<std::string, int, std::less<>>& line,
              std::vector<ConfigError::Item>& err) {
  const auto at = [&](std::string_view k) {
    auto it = line.find(k);
    return it == line.end() ? 0 : it->second;
  };
  const auto has = [&](std::string_view k) { return line.count(k) > 0; };
  const auto fail = [&](std::string_view k, std::string msg) { err.push_back({at(k), std::move(msg)}); };
  const auto missing = [&](std::string_view k, std::string why = {}) {
    err.push_back({0, "missing key " + std::string(k) + (why.empty() ? "" : " (" + why + ")")});
  };

  // metric
  if (!has("metric.kind")) missing("metric.kind");
  const auto& M = c.metric;
  if (M.kind == MetricKind::Kerr) {
    if (!has("metric.m")) missing("metric.m", "required for kerr");
    if (!has("metric.a")) missing("metric.a", "required for kerr");
    if (has("metric.m") && !(M.m > 0)) fail("metric.m", "metric.m must be > 0");
    if (has("metric.a") && M.a < 0) fail("metric.a", "metric.a must be >= 0");
    for (auto k : {"metric.A", "metric.B"})
      if (has(k)) fail(k, std::string(k) + " does not apply to kerr");
  } else if (M.kind == MetricKind::Acoustic) {
    if (!has("metric.A")) missing("metric.A", "required for acoustic");
    if (!has("metric.B")) missing("metric.B", "required for acoustic");
    if (has("metric.A") && has("metric.B") && M.A == 0 && M.B == 0)
      fail("metric.B", "acoustic flow must be nonzero");
    for (auto k : {"metric.m", "metric.a"})
      if (has(k)) fail(k, std::string(k) + " does not apply to acoustic");
  } else if (has("metric.kind")) {
    for (auto k : {"metric.A", "metric.B", "metric.m", "metric.a"})
      if (has(k)) fail(k, std::string(k) + " does not apply to flat");
    if (c.scenario != ScenarioKind::Trajectories) fail("scenario", "flat metric supports only trajectories");
  }

  // scenario / metric compatibility
  const bool acoustic_scn = c.scenario == ScenarioKind::AcousticSuperradiant ||
                            c.scenario == ScenarioKind::AcousticNaked ||
                            c.scenario == ScenarioKind::AcousticShortlived ||
                            c.scenario == ScenarioKind::WhiteHole;
  const bool kerr_scn = c.scenario == ScenarioKind::KerrEquatorial ||
                        c.scenario == ScenarioKind::KerrOffEquatorial ||
                        c.scenario == ScenarioKind::KerrExtremalNaked;
  if (acoustic_scn && M.kind != MetricKind::Acoustic)
    fail("scenario", std::string(to_string(c.scenario)) + " needs metric.kind = acoustic");
  if (kerr_scn && M.kind != MetricKind::Kerr)
    fail("scenario", std::string(to_string(c.scenario)) + " needs metric.kind = kerr");
  if (c.scenario == ScenarioKind::WhiteHole && M.kind == MetricKind::Acoustic && !(M.A > 0))
    fail("metric.A", "white-hole needs metric.A > 0");
  if (c.scenario == ScenarioKind::AcousticNaked && M.kind == MetricKind::Acoustic && M.A != 0)
    fail("metric.A", "acoustic-naked needs metric.A = 0");
  if (c.scenario == ScenarioKind::KerrOffEquatorial && !(c.initial.z0 > 0))
    fail("initial.z0", "kerr-offequatorial needs initial.z0 > 0");

  // initial data
  const auto& I = c.initial;
  const bool rho0_optional = c.scenario == ScenarioKind::KerrExtremalNaked;
  if (!I.rho0 && !rho0_optional) missing("initial.rho0");
  if (I.rho0 && !(*I.rho0 > 0)) fail("initial.rho0", "initial.rho0 must be > 0");
  const std::string implied = implied_preset(c.scenario);
  if (!implied.empty()) {
    if (!I.preset.empty() && I.preset != implied)
      fail("initial.preset", std::string(to_string(c.scenario)) + " uses preset " + implied);
    for (auto k : {"initial.eta_phi", "initial.eta_z"})
      if (has(k)) fail(k, std::string(k) + " is fixed by the scenario preset");
    if (has("initial.eta_rho") && c.scenario != ScenarioKind::AcousticNaked)
      fail("initial.eta_rho", "initial.eta_rho is fixed by the scenario preset");
  } else if (I.preset.empty()) {
    for (auto k : {"initial.eta_rho", "initial.eta_phi"})
      if (!has(k)) missing(k, "no initial.preset given");
  } else {
    const bool acoustic_preset = I.preset != "eq-7.5";
    if (acoustic_preset && M.kind != MetricKind::Acoustic)
      fail("initial.preset", "preset " + I.preset + " needs metric.kind = acoustic");
    if (!acoustic_preset && M.kind != MetricKind::Kerr)
      fail("initial.preset", "preset eq-7.5 needs metric.kind = kerr");
    for (auto k : {"initial.eta_phi", "initial.eta_z"})
      if (has(k)) fail(k, std::string(k) + " conflicts with initial.preset");
    if (has("initial.eta_rho") && I.preset != "remark-4.2")
      fail("initial.eta_rho", "initial.eta_rho conflicts with initial.preset " + I.preset);
    if (I.preset == "remark-4.2" && M.kind == MetricKind::Acoustic && M.A != 0)
      fail("initial.preset", "preset remark-4.2 needs metric.A = 0");
    if (I.preset == "eq-4.9" && I.rho0 && M.kind == MetricKind::Acoustic && !(*I.rho0 > 2 * std::abs(M.A)))
      fail("initial.rho0", "preset eq-4.9 needs initial.rho0 > 2|metric.A|");
    if (I.preset == "eq-7.5" && I.rho0 && M.kind == MetricKind::Kerr && !(*I.rho0 > M.a))
      fail("initial.rho0", "preset eq-7.5 needs initial.rho0 > metric.a");
  }
  if (I.preset == "remark-4.2" || c.scenario == ScenarioKind::AcousticNaked)
    if (I.eta_rho && !(*I.eta_rho < 0)) fail("initial.eta_rho", "remark-4.2 needs initial.eta_rho < 0");

  // run selection
  if (c.branches.empty()) fail("run.branches", "run.branches must not be empty");
  if (c.directions.empty()) fail("run.directions", "run.directions must not be empty");

  // stops
  const auto positive = [&](std::string_view k, double v) {
    if (!(v > 0)) fail(k, std::string(k) + " must be > 0");
  };
  positive("stop.escape_factor", c.stops.escape_factor);
  positive("stop.max_x0", c.stops.max_x0);
  positive("stop.rtol", c.stops.rtol);
  positive("stop.atol", c.stops.atol);
  positive("stop.ring_tol", c.stops.ring_tol);
  positive("stop.center_tol", c.stops.center_tol);
  positive("stop.approach_depth", c.stops.approach_depth);
  positive("stop.h_tol", c.stops.h_tol);
  if (c.stops.escape_radius < 0) fail("stop.escape_radius", "stop.escape_radius must be >= 0");
  if (c.stops.max_steps == 0) fail("stop.max_steps", "stop.max_steps must be > 0");

  // bump / quadrature
  for (auto k : {"bump.halfwidth_rho", "bump.halfwidth_phi", "bump.halfwidth_z", "bump.normalization"})
    if (has(k) && !c.bump.enabled) fail(k, std::string(k) + " given but bump.enabled is not true");
  for (auto [k, v] : {std::pair{"bump.halfwidth_rho", c.bump.halfwidth_rho},
                      std::pair{"bump.halfwidth_phi", c.bump.halfwidth_phi},
                      std::pair{"bump.halfwidth_z", c.bump.halfwidth_z}})
    if (v && !(*v > 0)) fail(k, std::string(k) + " must be > 0");
  if (c.bump.halfwidth_phi && *c.bump.halfwidth_phi > std::numbers::pi)
    fail("bump.halfwidth_phi", "bump.halfwidth_phi must be <= pi");
  if (!(c.bump.normalization > 0)) fail("bump.normalization", "bump.normalization must be > 0");
  for (auto [k, v] : {std::pair{"quadrature.order", c.quadrature.order},
                      std::pair{"quadrature.check_order", c.quadrature.check_order}})
    if (v != 8 && v != 16 && v != 32 && v != 64) fail(k, std::string(k) + " must be one of 8, 16, 32, 64");
  if (c.quadrature.panels < 1) fail("quadrature.panels", "quadrature.panels must be >= 1");
  positive("quadrature.tolerance", c.quadrature.tolerance);
  positive("audit.tolerance", c.audit_tolerance);

  // sweep
  if (c.sweep) {
    const auto& s = *c.sweep;
    const KeyDef* k = find_key(s.key);
    if (s.key.empty())
      missing("sweep.key", "sweep.* given");
    else if (!k || !k->numeric)
      fail("sweep.key", "sweep.key must name a numeric key, got '" + s.key + "'");
    if (s.values.empty() && s.random == 0) missing("sweep.values", "or sweep.random > 0");
    if (s.random > 0 && !(s.min < s.max)) fail("sweep.min", "sweep.min must be < sweep.max");
  }
}

}  // namespace

const char* to_string(ScenarioKind k) {
  for (auto [kk, n] : kScenarioNames)
    if (kk == k) return n;
  return "?";
}

void set_key(RunConfig& c, std::string_view key, std::string_view value) {
  const KeyDef* k = find_key(key);
  if (!k) throw ConfigError({{0, "unknown key " + std::string(key)}});
  try {
    k->set(c, trim(value));
  } catch (const BadValue& e) {
    throw ConfigError({{0, std::string(key) + ": " + e.message}});
  }
}

std::optional<std::string> get_key(const RunConfig& c, std::string_view key) {
  const KeyDef* k = find_key(key);
  if (!k) throw ConfigError({{0, "unknown key " + std::string(key)}});
  return k->get(c);
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::vector<ConfigError::Item> err;
  std::map<std::string, int, std::less<>> line;
  int n = 0;
  while (!text.empty() || n == 0) {
    ++n;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto h = raw.find('#'); h != std::string_view::npos) raw = raw.substr(0, h);
    raw = trim(raw);
    if (raw.empty()) {
      if (text.empty()) break;
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      err.push_back({n, "expected 'key = value'"});
      continue;
    }
    const auto key = trim(raw.substr(0, eq));
    const auto value = trim(raw.substr(eq + 1));
    const KeyDef* k = find_key(key);
    if (!k) {
      err.push_back({n, "unknown key '" + std::string(key) + "'"});
      continue;
    }
    if (auto it = line.find(key); it != line.end()) {
      err.push_back({n, "duplicate key " + std::string(key) + " (first set on line " +
                            std::to_string(it->second) + ")"});
      continue;
    }
    line.emplace(std::string(key), n);
    if (value.empty()) {
      err.push_back({n, std::string(key) + ": empty value"});
      continue;
    }
    try {
      k->set(c, value);
    } catch (const BadValue& e) {
      err.push_back({n, std::string(key) + ": " + e.message});
    }
  }
  validate(c, line, err);
  if (!err.empty()) {
    std::stable_sort(err.begin(), err.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
    throw ConfigError(std::move(err));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({{0, "cannot read " + path}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    const auto v = k.get(c);
    if (!v) continue;
    if (k.key == std::string_view("metric.A") || k.key == std::string_view("metric.B")) {
      if (c.metric.kind != MetricKind::Acoustic) continue;
    }
    if (k.key == std::string_view("metric.m") || k.key == std::string_view("metric.a")) {
      if (c.metric.kind != MetricKind::Kerr) continue;
    }
    if (std::string_view(k.key).starts_with("bump.") && k.key != std::string_view("bump.enabled") &&
        !c.bump.enabled)
      continue;
    const std::string_view key = k.key;
    const auto dot = key.find('.');
    const std::string sec(dot == std::string_view::npos ? std::string_view{} : key.substr(0, dot));
    if (sec != section && !out.empty()) out += '\n';
    section = sec;
    out += std::string(key) + " = " + *v + "\n";
  }
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_text(a) == to_text(b); }

InitialData resolve_initial(const RunConfig& c) {
  const auto& I = c.initial;
  const auto& M = c.metric;
  const std::string preset = I.preset.empty() ? implied_preset(c.scenario) : I.preset;
  const double rho0 = I.rho0 ? *I.rho0 : kerr_naked_default_rho0(M.m, M.a);
  InitialData d;
  if (preset == "eq-4.9") {
    // the white hole reuses the black-hole data of the reversed flow
    const bool wh = c.scenario == ScenarioKind::WhiteHole;
    d = acoustic_superradiant_data(wh ? -M.A : M.A, wh ? -M.B : M.B, rho0);
  } else if (preset == "eq-5.2") {
    d = acoustic_shortlived_data(M.A, M.B, rho0);
  } else if (preset == "eq-7.5") {
    d = kerr_corotating_data(M.m, M.a, rho0, I.z0);
  } else if (preset == "remark-4.2") {
    d = acoustic_naked_data(M.B, rho0, I.eta_rho.value_or(-0.1));
  } else {
    d.y0 = {rho0, I.phi0, I.z0};
    d.eta = {*I.eta_rho, *I.eta_phi, I.eta_z.value_or(0.0)};
    return d;
  }
  d.y0.phi = I.phi0;
  if (preset != "eq-7.5") d.y0.z = I.z0;
  return d;
}

BumpSpec resolve_bump(const RunConfig& c) {
  auto b = default_bump(c.metric, resolve_initial(c).y0);
  if (c.bump.halfwidth_rho) b.halfwidths[0] = *c.bump.halfwidth_rho;
  if (c.bump.halfwidth_phi) b.halfwidths[1] = *c.bump.halfwidth_phi;
  if (c.bump.halfwidth_z) b.halfwidths[2] = *c.bump.halfwidth_z;
  b.normalization = c.bump.normalization;
  return b;
}

ScenarioOptions scenario_options(const RunConfig& c) {
  ScenarioOptions o;
  o.stops = c.stops;
  o.energy = c.bump.enabled;
  if (c.bump.enabled) o.bump = resolve_bump(c);
  o.quadrature = c.quadrature;
  o.strict_audit = c.strict_audit;
  o.audit_tolerance = c.audit_tolerance;
  return o;
}

ScenarioOutcome run_scenario(const RunConfig& c) {
  const auto o = scenario_options(c);
  const auto& M = c.metric;
  const double rho0 = c.initial.rho0.value_or(0.0);
  switch (c.scenario) {
    case ScenarioKind::Trajectories:
      return run_trajectories(M, resolve_initial(c), c.branches, c.directions, o);
    case ScenarioKind::AcousticSuperradiant: return run_acoustic_superradiant(M.A, M.B, rho0, o);
    case ScenarioKind::AcousticNaked:
      return run_acoustic_naked(M.B, rho0, c.initial.eta_rho.value_or(-0.1), o);
    case ScenarioKind::AcousticShortlived: return run_acoustic_shortlived(M.A, M.B, rho0, o);
    case ScenarioKind::WhiteHole: return run_white_hole(M.A, M.B, rho0, o);
    case ScenarioKind::KerrEquatorial: return run_kerr_equatorial(M.m, M.a, rho0, o);
    case ScenarioKind::KerrOffEquatorial: return run_kerr_offequatorial(M.m, M.a, rho0, c.initial.z0, o);
    case ScenarioKind::KerrExtremalNaked: return run_kerr_extremal_and_naked(M.m, M.a, rho0, o);
  }
  throw Error("unhandled scenario");
}

std::vector<double> sweep_values(const SweepSpec& s, std::uint64_t seed) {
  std::vector<double> v = s.values;
  if (s.random > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(s.min, s.max);
    for (std::size_t i = 0; i < s.random; ++i) v.push_back(u(rng));
  }
  return v;
}

}  // namespace superrad
