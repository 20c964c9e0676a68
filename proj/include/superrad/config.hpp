#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "superrad/scenarios.hpp"

namespace superrad {

enum class OutputFormat { Csv, Jsonl };
const char* to_string(OutputFormat f);

// Which scenario `run` executes. Trajectories integrates the configured branches and
// directions from the configured initial data without scenario-level checks.
enum class ScenarioKind {
  Trajectories,
  AcousticSuperradiant,
  AcousticNaked,
  AcousticShortlived,
  WhiteHole,
  KerrEquatorial,
  KerrOffEquatorial,
  KerrExtremalNaked,
};
const char* to_string(ScenarioKind k);

struct InitialSpec {
  std::string preset;  // "eq-4.9", "eq-5.2", "eq-7.5", "remark-4.2" or empty for explicit η
  std::optional<double> rho0;
  double phi0 = 0.0;
  double z0 = 0.0;
  std::optional<double> eta_rho, eta_phi, eta_z;
};

struct SweepSpec {
  std::string key;             // any numeric config key, e.g. metric.a
  std::vector<double> values;  // explicit grid
  std::size_t random = 0;      // extra uniform samples in [min, max] drawn from the seed
  double min = 0.0;
  double max = 0.0;
};

// Energy reports are enabled by `bump.enabled = true`; unset halfwidths take the
// model defaults and the centre always follows the initial point.
struct BumpConfig {
  bool enabled = false;
  std::optional<double> halfwidth_rho, halfwidth_phi, halfwidth_z;
  double normalization = 1.0;
};

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::Trajectories;
  MetricModel metric;
  InitialSpec initial;
  std::vector<Branch> branches{Branch::Plus, Branch::Minus};
  std::vector<Direction> directions{Direction::Forward, Direction::Backward};
  StopSpec stops;
  BumpConfig bump;
  QuadratureSpec quadrature;
  OutputFormat format = OutputFormat::Csv;
  bool plot = false;
  std::uint64_t seed = 0;
  std::optional<SweepSpec> sweep;
  bool strict_audit = false;
  double audit_tolerance = 1e-9;
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Parses and validates `key = value` lines (`#` comments, blank lines ignored).
// Throws ConfigError carrying every problem found, each with its line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Canonical text; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& c);

// Sets one key from its textual value, as the parser would. Throws ConfigError.
void set_key(RunConfig& c, std::string_view key, std::string_view value);
// Canonical textual value of a key, empty optional when the key is unset.
std::optional<std::string> get_key(const RunConfig& c, std::string_view key);

// Initial data resolved from the preset or explicit η.
InitialData resolve_initial(const RunConfig& c);
ScenarioOptions scenario_options(const RunConfig& c);
// Bump for energy reports at the resolved initial point (defaults filled in).
BumpSpec resolve_bump(const RunConfig& c);
// Dispatches on c.scenario.
ScenarioOutcome run_scenario(const RunConfig& c);

// Sweep points: explicit values first, then seeded random draws.
std::vector<double> sweep_values(const SweepSpec& s, std::uint64_t seed);

}  // namespace superrad
