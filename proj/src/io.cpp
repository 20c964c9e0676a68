#include "superrad/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "superrad/errors.hpp"
#include "superrad/report.hpp"

namespace superrad {

namespace {

constexpr const char* kColumns[] = {"s",      "x0",     "rho",  "phi_unwrapped", "z",      "xi_rho",
                                    "xi_phi", "xi_z",   "H_residual", "delta1", "delta2", "region"};

std::array<double PathRow::*, 11> numeric_members() {
  return {&PathRow::s,      &PathRow::x0,   &PathRow::rho,        &PathRow::phi_unwrapped,
          &PathRow::z,      &PathRow::xi_rho, &PathRow::xi_phi,   &PathRow::xi_z,
          &PathRow::H_residual, &PathRow::delta1, &PathRow::delta2};
}

void check_finite(const GeodesicPath& path, const std::vector<PathRow>& rows) {
  if (path.count(EventKind::NumericalFailure) > 0) return;
  for (const auto& r : rows)
    for (auto m : numeric_members())
      if (!std::isfinite(r.*m))
        throw Error("non-finite value at s = " + format_double(r.s) +
                    " in a path without a NumericalFailure event");
}

double parse_double(std::string_view t, std::size_t line) {
  double v = 0.0;
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Error("line " + std::to_string(line) + ": bad number '" + std::string(t) + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot open " + file.string() + " for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& file) {
  os.flush();
  if (!os) throw Error("write to " + file.string() + " failed");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<PathRow> path_rows(const GeodesicPath& path) {
  std::vector<PathRow> rows;
  rows.reserve(path.samples.size());
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    const auto& s = path.samples[i];
    const auto& d = path.diagnostics[i];
    rows.push_back({s.s, s.x0, s.p.rho, s.p.phi, s.p.z, s.xi.xi_rho, s.xi.xi_phi, s.xi.xi_z,
                    d.H_residual, d.delta1, d.delta2, to_string(d.region)});
  }
  return rows;
}

void write_path_csv(std::ostream& os, const GeodesicPath& path) {
  const auto rows = path_rows(path);
  check_finite(path, rows);
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    for (auto m : numeric_members()) os << format_double(r.*m) << ',';
    os << r.region << '\n';
  }
}

void write_path_jsonl(std::ostream& os, const GeodesicPath& path) {
  const auto rows = path_rows(path);
  check_finite(path, rows);
  const auto members = numeric_members();
  for (const auto& r : rows) {
    os << '{';
    for (std::size_t k = 0; k < members.size(); ++k) {
      const double v = r.*members[k];
      os << '"' << kColumns[k] << "\":" << (std::isfinite(v) ? format_double(v) : "null") << ',';
    }
    os << "\"region\":\"" << r.region << "\"}\n";
  }
}

std::vector<PathRow> read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw Error("CSV header mismatch");
  std::vector<PathRow> rows;
  std::size_t n = 1;
  const auto members = numeric_members();
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    std::string_view rest = line;
    PathRow r{};
    for (auto m : members) {
      const auto c = rest.find(',');
      if (c == std::string_view::npos) throw Error("line " + std::to_string(n) + ": too few columns");
      r.*m = parse_double(rest.substr(0, c), n);
      rest.remove_prefix(c + 1);
    }
    if (rest.find(',') != std::string_view::npos) throw Error("line " + std::to_string(n) + ": too many columns");
    r.region = std::string(rest);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<PathRow> read_path_jsonl(std::istream& is) {
  std::vector<PathRow> rows;
  std::string line;
  const auto members = numeric_members();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = Json::parse(line);
    PathRow r{};
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto& v = j.at(kColumns[k]);
      r.*members[k] = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    }
    r.region = j.at("region").get<std::string>();
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  auto os = open_out(file);
  os << text;
  finish(os, file);
}

std::vector<std::filesystem::path> emit_path(const GeodesicPath& path, const std::filesystem::path& dir,
                                             const std::string& stem, OutputFormat format, bool plot) {
  std::vector<std::filesystem::path> files;
  const auto main = dir / (stem + (format == OutputFormat::Csv ? ".csv" : ".jsonl"));
  {
    std::ostringstream ss;
    if (format == OutputFormat::Csv)
      write_path_csv(ss, path);
    else
      write_path_jsonl(ss, path);
    write_file(main, ss.str());
    files.push_back(main);
  }
  const auto ev = dir / (stem + ".events.json");
  write_file(ev, dump(events_json(path)));
  files.push_back(ev);
  if (plot) {
    std::string a = "# x0 rho\n", b = "# rho*cos(phi) rho*sin(phi)\n";
    for (const auto& s : path.samples) {
      a += format_double(s.x0) + ' ' + format_double(s.p.rho) + '\n';
      b += format_double(s.p.rho * std::cos(s.p.phi)) + ' ' + format_double(s.p.rho * std::sin(s.p.phi)) + '\n';
    }
    const auto fa = dir / (stem + ".x0_rho.dat"), fb = dir / (stem + ".xy.dat");
    write_file(fa, a);
    write_file(fb, b);
    files.push_back(fa);
    files.push_back(fb);
  }
  return files;
}

}  // namespace superrad
