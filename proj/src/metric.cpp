#include "superrad/metric.hpp"

#include <cmath>
#include <numbers>

#include "superrad/detail/symbol.hpp"
#include "superrad/errors.hpp"

namespace superrad {

MetricModel MetricModel::acoustic(double A, double B) {
  MetricModel m;
  m.kind = MetricKind::Acoustic;
  m.A = A;
  m.B = B;
  m.validate();
  return m;
}

MetricModel MetricModel::kerr(double mass, double spin) {
  MetricModel m;
  m.kind = MetricKind::Kerr;
  m.m = mass;
  m.a = spin;
  m.validate();
  return m;
}

MetricModel MetricModel::flat() { return MetricModel{}; }

void MetricModel::validate() const {
  switch (kind) {
    case MetricKind::Acoustic:
      if (!std::isfinite(A) || !std::isfinite(B)) throw DomainError("acoustic A, B must be finite");
      if (A == 0.0 && B == 0.0) throw DomainError("acoustic flow must be nonzero");
      break;
    case MetricKind::Kerr:
      if (!std::isfinite(m) || !(m > 0.0)) throw DomainError("Kerr mass must be finite and > 0");
      if (!std::isfinite(a) || a < 0.0) throw DomainError("Kerr spin must be finite and >= 0");
      break;
    case MetricKind::Flat:
      break;
  }
}

double SpatialPoint::phi_normalized() const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double v = std::fmod(phi, two_pi);
  if (v < 0.0) v += two_pi;
  return v >= two_pi ? 0.0 : v;
}

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Acoustic: return "acoustic";
    case MetricKind::Kerr: return "kerr";
    case MetricKind::Flat: return "flat";
  }
  return "?";
}

std::string to_string(Region r) {
  switch (r) {
    case Region::Exterior: return "exterior";
    case Region::Ergoregion: return "ergoregion";
    case Region::BetweenHorizons: return "between_horizons";
    case Region::InsideInner: return "inside_inner";
    case Region::NoHorizonInterior: return "no_horizon_interior";
  }
  return "?";
}

double kerr_r(double rho, double z, double a) {
  if (rho < 0.0 || a < 0.0) throw DomainError("kerr_r: negative input");
  if (a > 0.0 && z == 0.0 && rho <= a) throw DegeneratePoint("kerr_r: point inside the equatorial disc");
  return std::sqrt(detail::kerr_r_squared(rho, z, a));
}

MetricFields metric_fields(const MetricModel& model, const SpatialPoint& p) {
  const auto s = detail::symbol<double>(model, p.rho, p.z, false);
  return {s.K, s.b[0], s.b[1], s.b[2], s.r};
}

std::optional<KerrHorizons> kerr_horizons(double m, double a) {
  if (a > m) return std::nullopt;
  const double root = std::sqrt(m * m - a * a);
  KerrHorizons h;
  h.r_plus = m + root;
  h.r_minus = m - root;
  h.rho_plus = std::sqrt(a * a + h.r_plus * h.r_plus);
  h.rho_minus = std::sqrt(a * a + h.r_minus * h.r_minus);
  return h;
}

double ergosphere_radius(const MetricModel& model) {
  switch (model.kind) {
    case MetricKind::Kerr: return std::sqrt(4.0 * model.m * model.m + model.a * model.a);
    case MetricKind::Acoustic: return std::hypot(model.A, model.B);
    case MetricKind::Flat: return 0.0;
  }
  return 0.0;
}

Region region_from_fields(const MetricModel& model, double rho, const MetricFields& f) {
  switch (model.kind) {
    case MetricKind::Acoustic:
      if (rho < std::abs(model.A)) return Region::BetweenHorizons;
      if (rho < std::hypot(model.A, model.B)) return Region::Ergoregion;
      return Region::Exterior;
    case MetricKind::Kerr:
      if (model.a < model.m) {
        const auto h = *kerr_horizons(model.m, model.a);
        if (f.r < h.r_minus) return Region::InsideInner;
        if (f.r < h.r_plus) return Region::BetweenHorizons;
        return f.K > 1.0 ? Region::Ergoregion : Region::Exterior;
      }
      if (f.K > 1.0) return Region::Ergoregion;
      return f.r < model.m ? Region::NoHorizonInterior : Region::Exterior;
    case MetricKind::Flat:
      return Region::Exterior;
  }
  return Region::Exterior;
}

Region region_classify(const MetricModel& model, const SpatialPoint& p) {
  return region_from_fields(model, p.rho, metric_fields(model, p));
}

std::optional<double> nearest_horizon_rho(const MetricModel& model, const SpatialPoint& p) {
  if (model.kind == MetricKind::Acoustic) {
    if (model.A == 0.0) return std::nullopt;
    return std::abs(model.A);
  }
  if (model.kind != MetricKind::Kerr) return std::nullopt;
  const auto h = kerr_horizons(model.m, model.a);
  if (!h) return std::nullopt;
  const double r = std::sqrt(detail::kerr_r_squared(p.rho, p.z, model.a));
  return std::abs(r - h->r_plus) <= std::abs(r - h->r_minus) ? h->rho_plus : h->rho_minus;
}

}  // namespace superrad
