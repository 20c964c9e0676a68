// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "superrad/batch.hpp"
#include "superrad/config.hpp"
#include "superrad/io.hpp"
#include "superrad/report.hpp"
#include "superrad/scenarios.hpp"

using namespace superrad;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
  void require(const ScenarioOutcome& o, const std::string& check) {
    const Check* c = o.check(check);
    if (!c) {
      require(false, check + " missing");
      return;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "=%.6g", c->value);
    require(c->passed, check + buf);
  }
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------------------------

Verdict hamiltonian_algebra() {
  Verdict v;
  oracle::StateSampler rs(1);
  const int n = 100000;
  const char* names[] = {"kerr", "acoustic", "flat"};
  for (int backend = 0; backend < 3; ++backend) {
    double root = 0, root_abs = 0, fact = 0, grad = 0;
    for (int i = 0; i < n; ++i) {
      const auto s = backend == 0 ? rs.kerr() : backend == 1 ? rs.acoustic() : rs.flat();
      const auto lam = lambda_roots(s.model, s.p, s.eta);
      for (double l : {lam.minus, lam.plus}) {
        const Covector xi{l, s.eta[0], s.eta[1], s.eta[2]};
        const double h = std::abs(eval_H(s.model, s.p, xi));
        root_abs = std::max(root_abs, h);
        root = std::max(root, h / oracle::residual_scale(s.model, s.p, xi));
      }
      const double x0 = rs.uniform(-3, 3);
      const Covector xi{x0, s.eta[0], s.eta[1], s.eta[2]};
      const double alpha = leading_coefficient(s.model, s.p);
      fact = std::max(fact, std::abs(eval_H(s.model, s.p, xi) - alpha * (x0 - lam.plus) * (x0 - lam.minus)) /
                                oracle::residual_scale(s.model, s.p, xi));
      if (i % 10 == 0) {
        const auto gr = grad_H(s.model, s.p, xi);
        const auto H = [&](SpatialPoint p, Covector c) { return eval_H(s.model, p, c); };
        const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
        const double hx = 1e-5, hr = 1e-5 * std::max(1.0, s.p.rho);
        grad = std::max({grad,
                         rel(gr.xi_rho, oracle::central_diff([&](double u) { auto c = xi; c.xi_rho = u; return H(s.p, c); }, xi.xi_rho, hx)),
                         rel(gr.xi_phi, oracle::central_diff([&](double u) { auto c = xi; c.xi_phi = u; return H(s.p, c); }, xi.xi_phi, hx)),
                         rel(gr.xi_z, oracle::central_diff([&](double u) { auto c = xi; c.xi_z = u; return H(s.p, c); }, xi.xi_z, hx)),
                         rel(gr.xi0, oracle::central_diff([&](double u) { auto c = xi; c.xi0 = u; return H(s.p, c); }, xi.xi0, hx)),
                         rel(gr.rho, oracle::central_diff([&](double u) { auto p = s.p; p.rho = u; return H(p, xi); }, s.p.rho, hr)),
                         rel(gr.z, oracle::central_diff([&](double u) { auto p = s.p; p.z = u; return H(p, xi); }, s.p.z, hx))});
      }
    }
    const std::string b = names[backend];
    v.require(root < 1e-12, b + " root " + g(root) + " (abs " + g(root_abs) + ")");
    v.require(fact < 1e-12, b + " factor " + g(fact));
    v.require(grad < 1e-6, b + " grad " + g(grad));
  }
  return v;
}

// ---- 2 ---------------------------------------------------------------------------------------

struct Family {
  std::string name;
  std::function<BatchItem(oracle::StateSampler&, int)> make;
  bool equatorial = false;
};

BatchItem item(const MetricModel& M, const InitialData& d, int i) {
  const Branch br = i % 2 ? Branch::Minus : Branch::Plus;
  const Direction dir = (i / 2) % 2 ? Direction::Backward : Direction::Forward;
  StopSpec s;
  s.max_x0 = 200;
  // same stop settings as the scenarios: spirals in quad, acoustic black holes end at the horizon
  if (br == Branch::Minus && dir == Direction::Backward) s.precision = Precision::Quad;
  if (M.kind == MetricKind::Acoustic && M.A < 0 && dir == Direction::Forward) s.stop_at_horizon = true;
  if (M.kind == MetricKind::Acoustic && M.A == 0 && br == Branch::Minus) s.precision = Precision::Quad;
  return {init_state(M, d.y0, d.eta, br), M, dir, s};
}

Verdict conservation() {
  Verdict v;
  const std::vector<Family> families = {
      {"acoustic-superradiant",
       [](oracle::StateSampler& r, int i) {
         const double A = -r.uniform(0.5, 2), rho0 = r.uniform(2.1, 4) * std::abs(A);
         const double B = acoustic_superradiance_threshold(A, rho0) * r.uniform(1.1, 3);
         return item(MetricModel::acoustic(A, B), acoustic_superradiant_data(A, B, rho0), i);
       }},
      {"acoustic-shortlived",
       [](oracle::StateSampler& r, int i) {
         const double A = -2, B = r.uniform(0.5, 1.5);
         const double rho0 = r.uniform(std::abs(A), std::hypot(A, B));
         return item(MetricModel::acoustic(A, B), acoustic_shortlived_data(A, B, rho0), i);
       }},
      {"acoustic-naked",
       [](oracle::StateSampler& r, int i) {
         const double B = r.uniform(8, 12);
         return item(MetricModel::acoustic(0, B), acoustic_naked_data(B, r.uniform(4, 6), -r.uniform(0.05, 0.2)), i);
       }},
      {"kerr-equatorial",
       [](oracle::StateSampler& r, int i) {
         const double a = r.uniform(0.3, 0.95);
         const double lo = kerr_horizons(1, a)->rho_plus, hi = std::sqrt(4 + a * a);
         return item(MetricModel::kerr(1, a), kerr_corotating_data(1, a, r.uniform(lo, hi)), i);
       },
       true},
      {"kerr-offequatorial",
       [](oracle::StateSampler& r, int i) {
         const double a = r.uniform(0.3, 0.95);
         const double lo = kerr_horizons(1, a)->rho_plus, hi = std::sqrt(4 + a * a);
         return item(MetricModel::kerr(1, a), kerr_corotating_data(1, a, r.uniform(lo, hi), r.uniform(1e-4, 0.05)), i);
       }},
      {"kerr-naked",
       [](oracle::StateSampler& r, int i) {
         const double a = r.uniform(1.01, 1.5);
         return item(MetricModel::kerr(1, a), kerr_corotating_data(1, a, kerr_naked_default_rho0(1, a)), i);
       }},
  };
  oracle::StateSampler rs(2);
  for (const auto& f : families) {
    std::vector<BatchItem> items;
    for (int i = 0; i < 50; ++i) items.push_back(f.make(rs, i));
    const auto res = integrate_batch(items);
    double h_scaled = 0, h_abs = 0, d0 = 0, dphi = 0, trap = 0;
    int errors = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (!res[i].path) {
        ++errors;
        continue;
      }
      const auto& p = *res[i].path;
      const auto& s0 = items[i].state;
      for (std::size_t k = 0; k < p.samples.size(); ++k) {
        const auto& s = p.samples[k];
        const double q = s.xi.xi_phi / s.p.rho;
        const double n2 = s.xi.xi0 * s.xi.xi0 + s.xi.xi_rho * s.xi.xi_rho + q * q + s.xi.xi_z * s.xi.xi_z;
        h_scaled = std::max(h_scaled, std::abs(p.diagnostics[k].H_residual) / (1.0 + n2));
        h_abs = std::max(h_abs, std::abs(p.diagnostics[k].H_residual));
        d0 = std::max(d0, std::abs(s.xi.xi0 - s0.xi.xi0) / std::max(1.0, std::abs(s0.xi.xi0)));
        dphi = std::max(dphi, std::abs(s.xi.xi_phi - s0.xi.xi_phi) / std::max(1.0, std::abs(s0.xi.xi_phi)));
        if (f.equatorial) trap = std::max({trap, std::abs(s.p.z), std::abs(s.xi.xi_z)});
      }
    }
    v.require(errors == 0 && h_scaled < 1e-8 && d0 < 1e-10 && dphi < 1e-10,
              f.name + " |H|/(1+|xi|^2) " + g(h_scaled) + " (abs " + g(h_abs) + "), xi0 " + g(d0) + ", xi_phi " +
                  g(dphi) + (errors ? ", errors " + std::to_string(errors) : ""));
    if (f.equatorial) v.require(trap < 1e-10, f.name + " trap " + g(trap));
  }
  return v;
}

// ---- 3-9 -------------------------------------------------------------------------------------

Verdict acoustic_black_hole() {
  Verdict v;
  ScenarioOptions o;
  o.energy = false;
  const auto s = run_acoustic_superradiant(-1, 10, 2.5, o);
  for (auto c : {"gate_threshold", "plus_forward_escapes", "plus_forward_rho_monotone",
                 "minus_forward_crosses_horizon", "plus_backward_turning_vs_exact",
                 "minus_backward_turning_vs_exact", "plus_expansion_error_halves", "minus_expansion_error_halves"})
    v.require(s, c);
  v.require(std::abs(s.check("gate_threshold")->value - 5.5) < 1e-12, "threshold 5.5");
  return v;
}

Verdict energy_suite() {
  Verdict v;
  const auto a = run_acoustic_superradiant(-1, 10, 2.5);
  const auto k = run_kerr_equatorial(1, 0.8, 2.0);
  for (const auto* s : {&a, &k})
    for (auto c : {"energy_additivity", "energy_minus_negative", "energy_plus_exceeds_sum",
                   "energy_quadrature_convergence"}) {
      const Check* x = s->check(c);
      v.require(x && x->passed, s->id + " " + c + "=" + (x ? g(x->value) : "?"));
    }
  return v;
}

Verdict short_lived() {
  Verdict v;
  const auto s = run_acoustic_shortlived(-2, 1, 2.1);
  for (auto c : {"lambda_minus_positive", "plus_turning_set_empty", "plus_forward_crosses_horizon",
                 "minus_forward_crosses_horizon", "superradiant"})
    v.require(s, c);
  return v;
}

Verdict kerr_equatorial() {
  Verdict v;
  ScenarioOptions o;
  o.energy = false;
  const auto s = run_kerr_equatorial(1, 0.8, 2.0, o);
  for (auto c : {"initial_delta1_is_one", "initial_lambda_plus_is_one", "plus_delta2_closed_form",
                 "plus_forward_terminates_on_ring", "minus_forward_terminates_on_ring", "plus_forward_terminal_exponent",
                 "minus_forward_terminal_exponent", "minus_backward_approach_fit_r2", "minus_backward_winding_turns"})
    v.require(s, c);
  return v;
}

Verdict kerr_off_equatorial() {
  Verdict v;
  const auto s = run_kerr_offequatorial(1, 0.8, 2.0, 1e-3);
  for (auto c : {"plus_forward_terminates_on_ring", "minus_forward_terminates_on_ring",
                 "plus_forward_audit_delta2_ge_I1sq", "minus_forward_audit_delta2_ge_I3sq",
                 "minus_forward_delta1_vs_delta_slope"})
    v.require(s, c);
  return v;
}

Verdict extremal_and_naked() {
  Verdict v;
  ScenarioOptions o;
  o.energy = false;
  const auto x = run_kerr_extremal_and_naked(1, 1, 0, o);
  v.require(x, "minus_backward_product_band");
  const auto n = run_kerr_extremal_and_naked(1, 1.2, 0, o);
  for (auto c : {"turning_certificate", "minus_backward_terminal_exponent", "winding_monotone_as_a_decreases"})
    v.require(n, c);
  return v;
}

Verdict white_hole() {
  Verdict v;
  ScenarioOptions o;
  const auto s = run_white_hole(1, -10, 2.5, o);
  v.require(s, "reversal_match_plus");
  v.require(s, "reversal_match_minus");
  return v;
}

// ---- 10 --------------------------------------------------------------------------------------

std::string run_to_bytes(const RunConfig& c, const fs::path& dir) {
  fs::remove_all(dir);
  const auto o = run_scenario(c);
  for (const auto& b : o.branches) emit_path(b.path, dir, o.id + "." + b.label, c.format, true);
  write_file(dir / (o.id + ".report.json"), dump(outcome_json(o, &c)));
  std::string all;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    all += f.filename().string() + "\n" + ss.str();
  }
  return all;
}

Verdict determinism() {
  Verdict v;
  const auto base = fs::temp_directory_path() / "superrad_acceptance";
  for (const char* text :
       {"scenario = kerr-equatorial\nmetric.kind = kerr\nmetric.m = 1\nmetric.a = 0.8\ninitial.rho0 = 2\nbump.enabled = true\n",
        "scenario = acoustic-superradiant\nmetric.kind = acoustic\nmetric.A = -1\nmetric.B = 10\ninitial.rho0 = 2.5\n"
        "bump.enabled = true\noutput.format = jsonl\n"}) {
    const auto c = parse_config(text);
    const auto a = run_to_bytes(c, base / "a");
    const auto b = run_to_bytes(c, base / "b");
    v.require(!a.empty() && a == b, std::string(to_string(c.scenario)) + " " + std::to_string(a.size()) + " bytes");
  }
  fs::remove_all(base);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"Hamiltonian algebra", hamiltonian_algebra},
      {"conservation", conservation},
      {"acoustic black hole", acoustic_black_hole},
      {"energy", energy_suite},
      {"short-lived superradiance", short_lived},
      {"Kerr equatorial", kerr_equatorial},
      {"Kerr off-equatorial", kerr_off_equatorial},
      {"extremal and naked Kerr", extremal_and_naked},
      {"white hole", white_hole},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s) [%.1fs]: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, dt,
                v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
