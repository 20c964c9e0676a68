#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "superrad/errors.hpp"
#include "superrad/io.hpp"
#include "superrad/report.hpp"

using namespace superrad;
namespace fs = std::filesystem;

namespace {

GeodesicPath sample_path() {
  const auto M = MetricModel::kerr(1, 0.8);
  const auto d = kerr_corotating_data(1, 0.8, 2.0);
  return integrate(init_state(M, d.y0, d.eta, Branch::Minus), M, Direction::Forward, {});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("CSV header is byte-exact") {
  std::ostringstream os;
  write_path_csv(os, sample_path());
  const auto s = os.str();
  CHECK(s.substr(0, s.find('\n')) == "s,x0,rho,phi_unwrapped,z,xi_rho,xi_phi,xi_z,H_residual,delta1,delta2,region");
}

TEST_CASE("CSV and JSONL round trip bit-exactly") {
  const auto p = sample_path();
  const auto rows = path_rows(p);
  std::stringstream csv, jl;
  write_path_csv(csv, p);
  write_path_jsonl(jl, p);
  const auto a = read_path_csv(csv);
  const auto b = read_path_jsonl(jl);
  REQUIRE(a.size() == rows.size());
  REQUIRE(b.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(a[i] == rows[i]);
    CHECK(b[i] == rows[i]);
  }
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(-2.0) == "-2");
  for (double v : {0.1 + 0.2, std::nextafter(1.0, 2.0), 5e-324, 1.7976931348623157e308}) {
    std::istringstream in(std::string(kCsvHeader) + "\n" + format_double(v) + ",0,0,0,0,0,0,0,0,0,0,exterior\n");
    CHECK(read_path_csv(in)[0].s == v);
  }
}

TEST_CASE("non-finite values need a failure event") {
  auto p = sample_path();
  p.diagnostics[3].delta1 = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream os;
  CHECK_THROWS_AS(write_path_csv(os, p), Error);
  p.events.push_back({EventKind::NumericalFailure});
  CHECK_NOTHROW(write_path_csv(os, p));
}

TEST_CASE("reader rejects malformed input") {
  std::istringstream bad_header("s,x0\n");
  CHECK_THROWS(read_path_csv(bad_header));
  std::istringstream short_row(std::string(kCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS(read_path_csv(short_row));
}

TEST_CASE("emit_path writes trajectory, events sidecar and plot data") {
  const auto dir = fs::temp_directory_path() / "superrad_io_test";
  fs::remove_all(dir);
  const auto p = sample_path();
  const auto files = emit_path(p, dir, "k", OutputFormat::Csv, true);
  REQUIRE(files.size() == 4);
  for (const auto& f : files) CHECK(fs::exists(f));
  const auto ev = Json::parse(slurp(dir / "k.events.json"));
  CHECK(ev["schema_version"] == kSchemaVersion);
  REQUIRE(ev["events"].size() == p.events.size());
  const auto& e0 = ev["events"][0];
  for (const char* k : {"kind", "s", "x0", "location", "data"}) CHECK(e0.contains(k));
  CHECK(ev["events"].back()["kind"] == "RingTermination");
  std::ifstream xy(dir / "k.xy.dat");
  std::string header, line;
  std::getline(xy, header);
  std::getline(xy, line);
  double x = 0, y = 0;
  std::istringstream(line) >> x >> y;
  CHECK(std::hypot(x, y) == doctest::Approx(p.samples[0].p.rho));
  // deterministic bytes
  const auto before = slurp(files[0]);
  emit_path(p, dir, "k", OutputFormat::Csv, true);
  CHECK(slurp(files[0]) == before);
  fs::remove_all(dir);
}

TEST_CASE("reports carry schema version, config echo and tolerances") {
  ScenarioOptions o;
  const auto s = run_acoustic_superradiant(-1, 10, 2.5, o);
  const auto c = parse_config(
      "scenario = acoustic-superradiant\nmetric.kind = acoustic\nmetric.A = -1\nmetric.B = 10\ninitial.rho0 = 2.5\nbump.enabled = true\n");
  const auto j = outcome_json(s, &c);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["config"]["metric.B"] == "10");
  CHECK(j["tolerances"]["rtol"] == 1e-10);
  for (const char* k : {"e_plus", "e_minus", "e_sum", "additivity_residual", "superradiant"}) CHECK(j["energy"].contains(k));
  CHECK(dump(j) == dump(outcome_json(s, &c)));
  // field order is stable
  auto it = j.begin();
  CHECK(it.key() == "schema_version");
}
