#pragma once

#include <string>

#include <json.hpp>

#include "superrad/config.hpp"
#include "superrad/scenarios.hpp"

namespace superrad {

using Json = nlohmann::ordered_json;

// Bumped whenever a report field changes meaning or disappears.
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kSoftwareVersion = "0.1.0";

Json fit_json(const Fit& f);
Json event_json(const Event& e);
Json events_json(const GeodesicPath& path);
Json energy_json(const EnergyReport& e);
Json turning_json(const TurningReport& r);
Json certificate_json(const KerrCertificate& c);
Json stops_json(const StopSpec& s);
// Config echo: the canonical key/value pairs in table order.
Json config_json(const RunConfig& c);

// Header fields shared by every report: schema_version, kind, software version, config echo.
Json report_header(const std::string& kind, const RunConfig* config);

Json outcome_json(const ScenarioOutcome& o, const RunConfig* config = nullptr);
Json energy_report_json(const EnergyReport& e, const BumpSpec& bump, const QuadratureSpec& q,
                        const RunConfig* config = nullptr);

// Two-space indented dump with a trailing newline; non-finite numbers become null.
std::string dump(const Json& j);

}  // namespace superrad
