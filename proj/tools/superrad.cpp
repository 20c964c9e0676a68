#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "superrad/config.hpp"
#include "superrad/errors.hpp"
#include "superrad/io.hpp"
#include "superrad/report.hpp"

using namespace superrad;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kGate = 4 };

struct Args {
  std::string config;
  std::string out = "out";
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  bool plot = false;
};

RunConfig load(const Args& a) {
  RunConfig c = load_config(a.config);
  if (a.format) set_key(c, "output.format", *a.format);
  if (a.seed) c.seed = *a.seed;
  if (a.plot) c.plot = true;
  return c;
}

bool has_failure(const ScenarioOutcome& o) {
  for (const auto& b : o.branches)
    if (b.path.count(EventKind::NumericalFailure) > 0) return true;
  return false;
}

// Writes paths and the report for one outcome into dir.
void write_outcome(const ScenarioOutcome& o, const RunConfig& c, const fs::path& dir) {
  for (const auto& b : o.branches) emit_path(b.path, dir, o.id + "." + b.label, c.format, c.plot);
  write_file(dir / (o.id + ".report.json"), dump(outcome_json(o, &c)));
}

void print_summary(const ScenarioOutcome& o) {
  for (const auto& b : o.branches)
    std::printf("%-16s %-26s %s\n", b.label.c_str(), to_string(b.classification),
                to_string(b.path.events.back().kind));
  std::size_t failed = 0;
  for (const auto& c : o.checks)
    if (!c.passed) {
      ++failed;
      std::printf("check failed: %s = %s (expected %s)\n", c.name.c_str(), format_double(c.value).c_str(),
                  c.expected.c_str());
    }
  std::printf("%s: %zu/%zu checks passed\n", o.id.c_str(), o.checks.size() - failed, o.checks.size());
}

int cmd_run(const Args& a) {
  const auto c = load(a);
  const auto o = run_scenario(c);
  write_outcome(o, c, a.out);
  print_summary(o);
  return has_failure(o) ? kNumerical : kOk;
}

int code_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError&) {
    return kConfig;
  } catch (const GateFailed&) {
    return kGate;
  } catch (const DomainError&) {
    return kGate;
  } catch (...) {
    return kNumerical;
  }
}

int cmd_sweep(const Args& a) {
  const auto c = load(a);
  if (!c.sweep) throw ConfigError({{0, "sweep needs sweep.key and sweep.values or sweep.random"}});
  const auto values = sweep_values(*c.sweep, c.seed);
  const auto n = static_cast<long>(values.size());
  std::vector<RunConfig> cfgs(values.size(), c);
  for (std::size_t i = 0; i < values.size(); ++i) {
    set_key(cfgs[i], c.sweep->key, format_double(values[i]));
    cfgs[i].sweep.reset();
  }
  std::vector<std::optional<ScenarioOutcome>> outs(values.size());
  std::vector<std::exception_ptr> errs(values.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      outs[i] = run_scenario(cfgs[i]);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  Json j = report_header("sweep", &c);
  j["key"] = c.sweep->key;
  j["points"] = Json::array();
  int code = kOk;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Json p{{"index", i}, {"value", values[i]}};
    const fs::path dir = fs::path(a.out) / ("point_" + std::to_string(i));
    if (outs[i]) {
      write_outcome(*outs[i], cfgs[i], dir);
      p["id"] = outs[i]->id;
      p["all_passed"] = outs[i]->all_passed();
      p["classifications"] = Json::object();
      for (const auto& b : outs[i]->branches) p["classifications"][b.label] = to_string(b.classification);
      if (has_failure(*outs[i])) code = std::max(code, static_cast<int>(kNumerical));
    } else {
      const int k = code_of(errs[i]);
      code = std::max(code, k);
      try {
        std::rethrow_exception(errs[i]);
      } catch (const std::exception& e) {
        p["error"] = e.what();
      }
      std::fprintf(stderr, "point %zu (%s = %s): %s\n", i, c.sweep->key.c_str(),
                   format_double(values[i]).c_str(), p["error"].get<std::string>().c_str());
    }
    j["points"].push_back(p);
  }
  write_file(fs::path(a.out) / "sweep.json", dump(j));
  std::printf("sweep over %s: %zu points\n", c.sweep->key.c_str(), values.size());
  return code;
}

int cmd_energy(const Args& a) {
  const auto c = load(a);
  const auto d = resolve_initial(c);
  const auto bump = resolve_bump(c);
  const auto e = superradiance_report(c.metric, bump, d.eta, c.quadrature);
  write_file(fs::path(a.out) / "energy.json", dump(energy_report_json(e, bump, c.quadrature, &c)));
  std::printf("e_plus %s  e_minus %s  e_sum %s  superradiant %s\n", format_double(e.e_plus).c_str(),
              format_double(e.e_minus).c_str(), format_double(e.e_sum).c_str(), e.superradiant ? "yes" : "no");
  if (!e.reason.empty()) std::printf("reason: %s\n", e.reason.c_str());
  return kOk;
}

int cmd_turning(const Args& a) {
  const auto c = load(a);
  const auto d = resolve_initial(c);
  Json j = report_header("turning", &c);
  if (c.metric.kind == MetricKind::Acoustic) {
    j["branches"] = Json::array();
    for (auto br : c.branches) {
      StopSpec s = c.stops;
      if (br == Branch::Minus) s.precision = Precision::Quad;  // backward spirals need it
      const auto path = integrate(init_state(c.metric, d.y0, d.eta, br), c.metric, Direction::Backward, s);
      const auto r = acoustic_turning_report(c.metric.A, c.metric.B, d.y0.rho, d.eta, br, &path);
      j["branches"].push_back(turning_json(r));
      std::printf("%s: %zu exact root(s), max numeric relative error %s\n", to_string(br),
                  r.exact_roots.size(), format_double(r.max_numeric_rel_error).c_str());
    }
  } else if (c.metric.kind == MetricKind::Kerr) {
    const auto cert = kerr_turning_certificate(c.metric.m, c.metric.a, d.y0.rho);
    j["certificate"] = certificate_json(cert);
    std::printf("turning certificate %s\n", cert.holds ? "holds" : "does not hold");
  } else {
    throw ConfigError({{0, "turning needs an acoustic or kerr metric"}});
  }
  write_file(fs::path(a.out) / "turning.json", dump(j));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null-geodesic and superradiance simulator"};
  app.require_subcommand(1);
  Args args;
  int (*handler)(const Args&) = nullptr;
  const auto add = [&](const char* name, const char* help, int (*fn)(const Args&)) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("config", args.config, "configuration file")->required();
    sc->add_option("--out", args.out, "output directory");
    sc->add_option("--format", args.format, "trajectory format")->check(CLI::IsMember({"csv", "jsonl"}));
    sc->add_option("--seed", args.seed, "seed for sampled sweeps");
    sc->add_flag("--plot", args.plot, "also write plot-data pair files");
    sc->callback([&handler, fn] { handler = fn; });
  };
  add("run", "run the configured scenario", cmd_run);
  add("sweep", "run the scenario over a parameter grid", cmd_sweep);
  add("energy", "superradiance energy report", cmd_energy);
  add("turning", "turning-point report", cmd_turning);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  try {
    return handler(args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kConfig;
  } catch (const GateFailed& e) {
    std::fprintf(stderr, "gate failed: %s\n", e.what());
    return kGate;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "gate failed: %s\n", e.what());
    return kGate;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  }
}
