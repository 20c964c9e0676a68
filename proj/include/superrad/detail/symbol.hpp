#pragma once

// Precision-generic metric coefficients and symbol algebra. Instantiated for double and
// for quad precision (boost float128) by the integrator.

#include <array>
#include <cmath>

#include "superrad/errors.hpp"
#include "superrad/metric.hpp"

namespace superrad::detail {

template <class R>
using Vec3 = std::array<R, 3>;

template <class R>
R dot(const Vec3<R>& u, const Vec3<R>& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

// H = α ξ₀² + 2ξ₀ (c·ξ̂) + κ (w·ξ̂)² − ξ̂·ξ̂ with ξ̂ = (ξ_ρ, ξ_φ/ρ, ξ_z).
// Kerr: α = 1+K, κ = K, c = −K b̂, w = b̂.  Acoustic: α = κ = 1, c = w = v.
// mu = (c·ξ̂)²/(w·ξ̂)² − ακ is kept exactly so Δ₁ = α ξ̂·ξ̂ + μ (w·ξ̂)² has no cancellation.
template <class R>
struct Symbol {
  R alpha{}, kappa{}, mu{};
  Vec3<R> c{}, w{};
  // partials: index 0 is ∂/∂ρ, index 1 is ∂/∂z
  std::array<R, 2> d_alpha{}, d_kappa{};
  std::array<Vec3<R>, 2> d_c{}, d_w{};
  R K{};
  Vec3<R> b{};
  R r{};
};

template <class R>
R kerr_r_squared(R rho, R z, R a) {
  using std::sqrt;
  const R d = rho * rho + z * z - a * a;
  const R disc = sqrt(d * d + 4 * a * a * z * z);
  if (d >= 0) return (d + disc) / 2;
  return 2 * a * a * z * z / (disc - d);  // same root, no cancellation
}

// The ring guard applies to direct evaluation only; integration runs closer to the ring and
// stops through its own termination event.
template <class R>
void check_kerr_point(R rho, R z, R a, bool guard_ring) {
  if (!(rho >= 0)) throw DomainError("negative cylindrical radius");
  if (a > 0) {
    const R dr = rho - a;
    if (guard_ring && dr * dr + z * z < R(1e-8) * a * a)
      throw DegeneratePoint("point on the Kerr ring");
    if (z == 0 && rho <= a) throw DegeneratePoint("point inside the Kerr equatorial disc");
  } else if (rho == 0 && z == 0) {
    throw DegeneratePoint("Kerr origin");
  }
}

template <class R>
Symbol<R> symbol(const MetricModel& model, R rho, R z, bool derivs, bool guard_ring = true) {
  using std::sqrt;
  Symbol<R> s;
  switch (model.kind) {
    case MetricKind::Flat: {
      if (rho < R(1e-10)) throw DegeneratePoint("point on the axis");
      s.alpha = 1;
      s.kappa = 0;
      s.mu = 0;
      s.b = {R(1), R(0), R(0)};
      return s;
    }
    case MetricKind::Acoustic: {
      if (rho < R(1e-10)) throw DegeneratePoint("point on the acoustic axis");
      const R A = model.A, B = model.B;
      const R nv = sqrt(A * A + B * B);
      s.alpha = 1;
      s.kappa = 1;
      s.mu = 0;
      s.c = {A / rho, B / rho, R(0)};
      s.w = s.c;
      s.K = (A * A + B * B) / (rho * rho);
      s.b = {A / nv, B / nv, R(0)};
      if (derivs) {
        const R r2 = rho * rho;
        s.d_c[0] = {-A / r2, -B / r2, R(0)};
        s.d_w[0] = s.d_c[0];
      }
      return s;
    }
    case MetricKind::Kerr: {
      const R a = model.a, m = model.m;
      check_kerr_point(rho, z, a, guard_ring);
      const R r2 = kerr_r_squared(rho, z, a);
      const R r = sqrt(r2);
      const R S = r2 + a * a;
      const R Q = r2 * r2 + a * a * z * z;
      const R K = 2 * m * r2 * r / Q;
      s.K = K;
      s.r = r;
      s.b = {r * rho / S, a * rho / S, z / r};
      s.alpha = 1 + K;
      s.kappa = K;
      s.mu = -K;
      s.c = {-K * s.b[0], -K * s.b[1], -K * s.b[2]};
      s.w = s.b;
      if (derivs) {
        // implicit differentiation of ρ²/(r²+a²) + z²/r² = 1
        const R D = r * rho * rho / (S * S) + z * z / (r2 * r);
        const R r_rho = (rho / S) / D;
        const R r_z = (z / r2) / D;
        const R P = 3 * a * a * z * z - r2 * r2;
        const R Q2 = Q * Q;
        const std::array<R, 2> dK = {2 * m * r2 * r_rho * P / Q2,
                                     2 * m * (r2 * r_z * P - 2 * a * a * z * r2 * r) / Q2};
        const R S2 = S * S;
        std::array<Vec3<R>, 2> db;
        db[0] = {(r_rho * rho + r) / S - 2 * r * r * rho * r_rho / S2,
                 a / S - 2 * a * rho * r * r_rho / S2,
                 -z * r_rho / r2};
        db[1] = {rho * r_z * (a * a - r2) / S2,
                 -2 * a * rho * r * r_z / S2,
                 1 / r - z * r_z / r2};
        for (int k = 0; k < 2; ++k) {
          s.d_alpha[k] = dK[k];
          s.d_kappa[k] = dK[k];
          s.d_w[k] = db[k];
          for (int i = 0; i < 3; ++i) s.d_c[k][i] = -(dK[k] * s.b[i] + K * db[k][i]);
        }
      }
      return s;
    }
  }
  throw DomainError("unknown metric kind");
}

template <class R>
struct Contractions {
  Vec3<R> xh;
  R C, W, S;
};

template <class R>
Contractions<R> contract(const Symbol<R>& s, R rho, R xr, R xp, R xz) {
  Contractions<R> t;
  t.xh = {xr, xp / rho, xz};
  t.C = dot(s.c, t.xh);
  t.W = dot(s.w, t.xh);
  t.S = dot(t.xh, t.xh);
  return t;
}

template <class R>
R hamiltonian(const Symbol<R>& s, R rho, R xi0, R xr, R xp, R xz) {
  const auto t = contract(s, rho, xr, xp, xz);
  return s.alpha * xi0 * xi0 + 2 * xi0 * t.C + s.kappa * t.W * t.W - t.S;
}

template <class R>
R delta1(const Symbol<R>& s, R rho, R xr, R xp, R xz) {
  const auto t = contract(s, rho, xr, xp, xz);
  return s.alpha * t.S + s.mu * t.W * t.W;
}

// Returns {λ⁻, λ⁺} using the cancellation-free product form for the smaller root.
template <class R>
std::array<R, 2> lambda_roots(const Symbol<R>& s, R rho, R xr, R xp, R xz) {
  using std::sqrt;
  const auto t = contract(s, rho, xr, xp, xz);
  const R d1 = s.alpha * t.S + s.mu * t.W * t.W;
  const R sq = sqrt(d1);
  const R c0 = s.kappa * t.W * t.W - t.S;  // λ⁺λ⁻ = c0/α
  if (t.C >= 0) {
    const R q = -(t.C + sq);
    return {q / s.alpha, c0 / q};
  }
  const R q = -t.C + sq;
  return {c0 / q, q / s.alpha};
}

// Partials in the order (ξ₀, ξ_ρ, ξ_φ, ξ_z, ρ, z); ∂/∂x₀ and ∂/∂φ vanish identically.
template <class R>
struct Grad {
  R xi0, xi_rho, xi_phi, xi_z, rho, z;
};

template <class R>
Grad<R> gradient(const Symbol<R>& s, R rho, R xi0, R xr, R xp, R xz) {
  const auto t = contract(s, rho, xr, xp, xz);
  Vec3<R> dxh;
  for (int i = 0; i < 3; ++i) dxh[i] = 2 * xi0 * s.c[i] + 2 * s.kappa * t.W * s.w[i] - 2 * t.xh[i];
  Grad<R> g;
  g.xi0 = 2 * s.alpha * xi0 + 2 * t.C;
  g.xi_rho = dxh[0];
  g.xi_phi = dxh[1] / rho;
  g.xi_z = dxh[2];
  std::array<R, 2> dx;
  for (int k = 0; k < 2; ++k) {
    dx[k] = s.d_alpha[k] * xi0 * xi0 + 2 * xi0 * dot(s.d_c[k], t.xh) +
            s.d_kappa[k] * t.W * t.W + 2 * s.kappa * t.W * dot(s.d_w[k], t.xh);
  }
  g.rho = dx[0] + dxh[1] * (-xp / (rho * rho));
  g.z = dx[1];
  return g;
}

// Radial discriminant: H_ξρ = ±2√Δ₂ at the real roots in ξ_ρ.
template <class R>
R delta2(const MetricModel& model, const Symbol<R>& s, R rho, R xi0, R xp, R xz) {
  const R q = xp / rho;
  switch (model.kind) {
    case MetricKind::Kerr: {
      const R u = -xi0 + s.b[2] * xz + s.b[1] * q;
      return s.K * u * u - (s.K * s.b[0] * s.b[0] - 1) * (xi0 * xi0 - xz * xz - q * q);
    }
    case MetricKind::Acoustic: {
      const R A = model.A, B = model.B;
      const R u = xi0 + B * xp / (rho * rho);
      return u * u + (A * A / (rho * rho) - 1) * (q * q + xz * xz);
    }
    case MetricKind::Flat:
      return xi0 * xi0 - q * q - xz * xz;
  }
  return R(0);
}

// Axial discriminant: H_ξz = ±2√Δ₃ at the real roots in ξ_z.
template <class R>
R delta3(const MetricModel& model, const Symbol<R>& s, R rho, R xi0, R xr, R xp) {
  const R q = xp / rho;
  switch (model.kind) {
    case MetricKind::Kerr: {
      const R u = -xi0 + s.b[0] * xr + s.b[1] * q;
      return s.K * u * u - (s.K * s.b[2] * s.b[2] - 1) * (xi0 * xi0 - xr * xr - q * q);
    }
    case MetricKind::Acoustic: {
      const R u = xi0 + s.c[0] * xr + s.c[1] * q;
      return u * u - xr * xr - q * q;
    }
    case MetricKind::Flat:
      return xi0 * xi0 - xr * xr - q * q;
  }
  return R(0);
}

}  // namespace superrad::detail
