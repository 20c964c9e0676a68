#include <doctest.h>

#include <string>

#include "superrad/config.hpp"
#include "superrad/errors.hpp"

using namespace superrad;

namespace {

std::vector<ConfigError::Item> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.items();
  }
  return {};
}

bool mentions(const std::vector<ConfigError::Item>& items, const std::string& what, int line = -1) {
  for (const auto& i : items)
    if (i.message.find(what) != std::string::npos && (line < 0 || i.line == line)) return true;
  return false;
}

const char* kKerr =
    "metric.kind = kerr\n"
    "metric.m = 1\n"
    "metric.a = 0.8\n"
    "initial.preset = eq-7.5\n"
    "initial.rho0 = 2.0\n";

}  // namespace

TEST_CASE("minimal Kerr config is valid") {
  const auto c = parse_config(kKerr);
  CHECK(c.metric.kind == MetricKind::Kerr);
  CHECK(c.metric.a == 0.8);
  CHECK(c.initial.preset == "eq-7.5");
  CHECK(*c.initial.rho0 == 2.0);
  CHECK(c.scenario == ScenarioKind::Trajectories);
  const auto d = resolve_initial(c);
  CHECK(d.eta[1] == 0.8);
}

TEST_CASE("negative spin is rejected with its line") {
  const auto e = errors_of("metric.kind = kerr\nmetric.m = 1\nmetric.a = -1\ninitial.preset = eq-7.5\ninitial.rho0 = 2\n");
  CHECK(mentions(e, "metric.a must be >= 0", 3));
}

TEST_CASE("missing initial keys are all listed") {
  const auto e = errors_of("metric.kind = kerr\nmetric.m = 1\nmetric.a = 0.8\n");
  CHECK(mentions(e, "initial.rho0"));
  CHECK(mentions(e, "initial.eta_rho"));
  CHECK(mentions(e, "initial.eta_phi"));
}

TEST_CASE("every error is reported, not just the first") {
  const auto e = errors_of(
      "metric.kind = kerr\n"
      "metric.m = -1\n"
      "metric.a = abc\n"
      "metric.colour = red\n"
      "no equals sign here\n"
      "metric.m = 2\n"
      "initial.rho0 = 2\n"
      "initial.preset = eq-9.9\n");
  CHECK(mentions(e, "metric.m must be > 0", 2));
  CHECK(mentions(e, "expected a number", 3));
  CHECK(mentions(e, "unknown key 'metric.colour'", 4));
  CHECK(mentions(e, "expected 'key = value'", 5));
  CHECK(mentions(e, "duplicate key metric.m", 6));
  CHECK(mentions(e, "unknown preset", 8));
  CHECK(e.size() >= 6);
}

TEST_CASE("cross-field validation") {
  CHECK(mentions(errors_of("scenario = kerr-equatorial\nmetric.kind = acoustic\nmetric.A = -1\nmetric.B = 10\ninitial.rho0 = 2\n"),
                 "needs metric.kind = kerr", 1));
  CHECK(mentions(errors_of("metric.kind = acoustic\nmetric.A = -1\nmetric.B = 10\nmetric.a = 1\ninitial.preset = eq-4.9\ninitial.rho0 = 3\n"),
                 "does not apply to acoustic", 4));
  CHECK(mentions(errors_of(std::string(kKerr) + "bump.halfwidth_rho = 0.1\n"), "bump.enabled", 6));
  CHECK(mentions(errors_of(std::string(kKerr) + "quadrature.order = 12\n"), "one of 8, 16, 32, 64", 6));
  CHECK(mentions(errors_of(std::string(kKerr) + "initial.eta_phi = 1\n"), "conflicts with initial.preset", 6));
  CHECK(mentions(errors_of(std::string(kKerr) + "sweep.key = output.format\nsweep.values = 1\n"), "numeric key", 6));
  CHECK(mentions(errors_of("scenario = kerr-offequatorial\nmetric.kind = kerr\nmetric.m = 1\nmetric.a = 0.8\ninitial.rho0 = 2\n"),
                 "initial.z0 > 0"));
}

TEST_CASE("comments, blank lines and whitespace") {
  const auto c = parse_config("# header\n\n  metric.kind = kerr   # trailing\nmetric.m=1\r\nmetric.a\t=\t0.5\ninitial.preset = eq-7.5\ninitial.rho0 = 1.9\n");
  CHECK(c.metric.a == 0.5);
}

TEST_CASE("round trip through canonical text") {
  const std::string text = std::string(kKerr) +
                           "run.branches = minus\n"
                           "run.directions = backward, forward\n"
                           "stop.rtol = 1e-11\n"
                           "stop.precision = quad\n"
                           "bump.enabled = true\n"
                           "bump.halfwidth_rho = 0.01\n"
                           "output.format = jsonl\n"
                           "seed = 42\n"
                           "sweep.key = metric.a\n"
                           "sweep.values = 0.1, 0.2\n";
  const auto c = parse_config(text);
  const auto t = to_text(c);
  const auto c2 = parse_config(t);
  CHECK(c2 == c);
  CHECK(to_text(c2) == t);
  CHECK(c2.stops.precision == Precision::Quad);
  CHECK(c2.directions.size() == 2);
  CHECK(*c2.bump.halfwidth_rho == 0.01);
  CHECK_FALSE(c2.bump.halfwidth_z);
  CHECK(c2.sweep->values == std::vector<double>{0.1, 0.2});
}

TEST_CASE("shortest round-trip numbers survive") {
  auto c = parse_config(kKerr);
  set_key(c, "stop.rtol", "0.1");
  set_key(c, "initial.rho0", "1.9999999999999998");
  CHECK(parse_config(to_text(c)).initial.rho0 == c.initial.rho0);
  CHECK(*get_key(c, "stop.rtol") == "0.1");
  CHECK_THROWS_AS(set_key(c, "bogus.key", "1"), ConfigError);
  CHECK_THROWS_AS(set_key(c, "metric.a", "x"), ConfigError);
}

TEST_CASE("sweep values are seeded and reproducible") {
  SweepSpec s;
  s.key = "metric.a";
  s.values = {0.5};
  s.random = 5;
  s.min = 0.1;
  s.max = 0.9;
  const auto a = sweep_values(s, 3), b = sweep_values(s, 3), c = sweep_values(s, 4);
  CHECK(a == b);
  CHECK(a != c);
  REQUIRE(a.size() == 6);
  CHECK(a[0] == 0.5);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK((a[i] >= 0.1 && a[i] < 0.9));
}

TEST_CASE("named scenarios imply their preset") {
  const auto c = parse_config("scenario = acoustic-superradiant\nmetric.kind = acoustic\nmetric.A = -1\nmetric.B = 10\ninitial.rho0 = 2.5\n");
  const auto d = resolve_initial(c);
  CHECK(d.eta[0] == doctest::Approx(-0.8));
  CHECK(mentions(errors_of("scenario = acoustic-superradiant\nmetric.kind = acoustic\nmetric.A = -1\nmetric.B = 10\ninitial.rho0 = 2.5\ninitial.preset = eq-5.2\n"),
                 "uses preset eq-4.9", 6));
}

TEST_CASE("ConfigError message carries line numbers") {
  try {
    parse_config("metric.kind = kerr\nfoo = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2: unknown key 'foo'") != std::string::npos);
  }
}
