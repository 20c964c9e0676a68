#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "superrad/config.hpp"
#include "superrad/integrator.hpp"

namespace superrad {

// One serialized sample, in column order.
struct PathRow {
  double s, x0, rho, phi_unwrapped, z, xi_rho, xi_phi, xi_z, H_residual, delta1, delta2;
  std::string region;
  bool operator==(const PathRow&) const = default;
};

inline constexpr const char* kCsvHeader =
    "s,x0,rho,phi_unwrapped,z,xi_rho,xi_phi,xi_z,H_residual,delta1,delta2,region";

std::vector<PathRow> path_rows(const GeodesicPath& path);

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Refuses non-finite values unless the path carries a NumericalFailure event.
void write_path_csv(std::ostream& os, const GeodesicPath& path);
void write_path_jsonl(std::ostream& os, const GeodesicPath& path);
std::vector<PathRow> read_path_csv(std::istream& is);
std::vector<PathRow> read_path_jsonl(std::istream& is);

// Writes <stem>.csv|.jsonl, <stem>.events.json and, with plot = true, <stem>.x0_rho.dat and
// <stem>.xy.dat. Returns the files written. I/O failures throw Error naming the path.
std::vector<std::filesystem::path> emit_path(const GeodesicPath& path, const std::filesystem::path& dir,
                                             const std::string& stem, OutputFormat format, bool plot);

// Writes text to a file, creating parent directories.
void write_file(const std::filesystem::path& file, const std::string& text);

}  // namespace superrad
