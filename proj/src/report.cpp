#include "superrad/report.hpp"

#include <sstream>

namespace superrad {

namespace {

Json point_json(const SpatialPoint& p) { return Json{{"rho", p.rho}, {"phi", p.phi}, {"z", p.z}}; }

Json model_json(const MetricModel& m) {
  Json j{{"kind", to_string(m.kind)}};
  if (m.kind == MetricKind::Acoustic) {
    j["A"] = m.A;
    j["B"] = m.B;
  } else if (m.kind == MetricKind::Kerr) {
    j["m"] = m.m;
    j["a"] = m.a;
  }
  return j;
}

Json branch_json(const BranchOutcome& b) {
  Json j;
  j["label"] = b.label;
  j["branch"] = to_string(b.branch);
  j["direction"] = to_string(b.direction);
  j["precision"] = to_string(b.path.stops.precision);
  j["classification"] = to_string(b.classification);
  if (!b.note.empty()) j["note"] = b.note;
  j["samples"] = b.path.samples.size();
  j["rejected_steps"] = b.path.rejected_steps;
  j["events"] = events_json(b.path)["events"];
  j["fits"] = Json::array();
  for (const auto& f : b.fits) j["fits"].push_back(fit_json(f));
  return j;
}

}  // namespace

Json fit_json(const Fit& f) {
  Json p = Json::object();
  for (const auto& [k, v] : f.params) p[k] = v;
  return Json{{"law", to_string(f.law)}, {"params", p},           {"r2", f.r2},
              {"n", f.n},                {"x_first", f.x_first}, {"x_last", f.x_last},
              {"resolved", f.resolved()}};
}

Json event_json(const Event& e) {
  Json j{{"kind", to_string(e.kind)}, {"s", e.s}, {"x0", e.x0}, {"location", point_json(e.location)},
         {"data", e.data}};
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

Json events_json(const GeodesicPath& path) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["branch"] = to_string(path.branch);
  j["direction"] = to_string(path.direction);
  j["events"] = Json::array();
  for (const auto& e : path.events) j["events"].push_back(event_json(e));
  return j;
}

Json energy_json(const EnergyReport& e) {
  return Json{{"e_plus", e.e_plus},
              {"e_minus", e.e_minus},
              {"e_sum", e.e_sum},
              {"additivity_residual", e.additivity_residual},
              {"superradiant", e.superradiant},
              {"convergence", e.convergence},
              {"lambda_minus_min", e.lambda_minus_min},
              {"lambda_minus_max", e.lambda_minus_max},
              {"support_in_ergoregion", e.support_in_ergoregion},
              {"planar", e.planar},
              {"reason", e.reason}};
}

Json turning_json(const TurningReport& r) {
  return Json{{"branch", to_string(r.branch)},
              {"xi0", r.xi0},
              {"exact_roots", r.exact_roots},
              {"asymptotic_roots", r.asymptotic_roots},
              {"numeric_roots", r.numeric_roots},
              {"residuals", r.residuals},
              {"residual_scales", r.residual_scales},
              {"max_numeric_rel_error", r.max_numeric_rel_error}};
}

Json certificate_json(const KerrCertificate& c) {
  return Json{{"xi0_minus", c.xi0_minus},
              {"delta2_at_rho0", c.delta2_at_rho0},
              {"ergosphere_rho", c.ergosphere_rho},
              {"delta2_at_ergosphere", c.delta2_at_ergosphere},
              {"holds", c.holds}};
}

Json stops_json(const StopSpec& s) {
  return Json{{"escape_factor", s.escape_factor}, {"escape_radius", s.escape_radius},
              {"max_x0", s.max_x0},               {"rtol", s.rtol},
              {"atol", s.atol},                   {"ring_tol", s.ring_tol},
              {"center_tol", s.center_tol},       {"approach_depth", s.approach_depth},
              {"h_tol", s.h_tol},                 {"stop_at_horizon", s.stop_at_horizon},
              {"max_steps", s.max_steps},         {"precision", to_string(s.precision)}};
}

Json config_json(const RunConfig& c) {
  Json j = Json::object();
  std::istringstream in(to_text(c));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

Json report_header(const std::string& kind, const RunConfig* config) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["software"] = Json{{"name", "superrad"}, {"version", kSoftwareVersion}};
  if (config) j["config"] = config_json(*config);
  return j;
}

Json outcome_json(const ScenarioOutcome& o, const RunConfig* config) {
  Json j = report_header("scenario", config);
  j["id"] = o.id;
  j["model"] = model_json(o.model);
  j["initial"] = Json{{"point", point_json(o.data.y0)},
                      {"eta", Json{{"xi_rho", o.data.eta[0]}, {"xi_phi", o.data.eta[1]}, {"xi_z", o.data.eta[2]}}}};
  j["tolerances"] = stops_json(config ? config->stops : StopSpec{});
  if (config) j["tolerances"]["audit"] = config->audit_tolerance;
  j["all_passed"] = o.all_passed();
  j["checks"] = Json::array();
  for (const auto& c : o.checks)
    j["checks"].push_back(Json{{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"expected", c.expected}});
  j["branches"] = Json::array();
  for (const auto& b : o.branches) j["branches"].push_back(branch_json(b));
  if (!o.turning.empty()) {
    j["turning"] = Json::array();
    for (const auto& t : o.turning) j["turning"].push_back(turning_json(t));
  }
  if (o.certificate) j["certificate"] = certificate_json(*o.certificate);
  if (o.energy) j["energy"] = energy_json(*o.energy);
  return j;
}

Json energy_report_json(const EnergyReport& e, const BumpSpec& bump, const QuadratureSpec& q,
                        const RunConfig* config) {
  Json j = report_header("energy", config);
  j["bump"] = Json{{"center", point_json(bump.center)},
                   {"halfwidths", bump.halfwidths},
                   {"normalization", bump.normalization}};
  j["quadrature"] = Json{{"order", q.order},
                         {"panels", q.panels},
                         {"check_order", q.check_order},
                         {"tolerance", q.tolerance}};
  j["energy"] = energy_json(e);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace superrad
