#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "superrad/errors.hpp"
#include "superrad/metric.hpp"

using namespace superrad;

TEST_CASE("kerr_r solves the spheroidal relation") {
  oracle::StateSampler rs(11);
  for (int i = 0; i < 200; ++i) {
    const double a = rs.uniform(0, 1.5), rho = rs.uniform(0.01, 5), z = rs.uniform(0.01, 3);
    const double r = kerr_r(rho, z, a);
    CHECK(r > 0);
    CHECK(rho * rho / (r * r + a * a) + z * z / (r * r) == doctest::Approx(1.0).epsilon(1e-13));
    // bisection oracle on the same relation
    const double rb = oracle::bisect(
        [&](double x) { return rho * rho / (x * x + a * a) + z * z / (x * x) - 1.0; }, 1e-12, 10.0);
    CHECK(r == doctest::Approx(rb).epsilon(1e-12));
  }
  CHECK(kerr_r(2.0, 0.0, 0.8) == doctest::Approx(std::sqrt(4.0 - 0.64)));
  CHECK_THROWS_AS(kerr_r(0.5, 0.0, 0.8), DegeneratePoint);
  CHECK_THROWS_AS(kerr_r(-1.0, 0.0, 0.8), DomainError);
}

TEST_CASE("Kerr horizons and ergosphere") {
  const auto h = kerr_horizons(1.0, 0.8);
  REQUIRE(h);
  CHECK(h->r_plus == doctest::Approx(1.6));
  CHECK(h->r_minus == doctest::Approx(0.4));
  CHECK(h->rho_plus == doctest::Approx(1.788854).epsilon(1e-6));
  CHECK(ergosphere_radius(MetricModel::kerr(1, 0.8)) == doctest::Approx(2.154066).epsilon(1e-6));
  CHECK_FALSE(kerr_horizons(1.0, 1.2));
  const auto e = kerr_horizons(1.0, 1.0);
  REQUIRE(e);
  CHECK(e->r_plus == e->r_minus);
}

TEST_CASE("equatorial Kerr fields") {
  const auto M = MetricModel::kerr(1.0, 0.8);
  const double rho = 2.0, r = std::sqrt(rho * rho - 0.64);
  const auto f = metric_fields(M, {rho, 0.3, 0.0});
  CHECK(f.r == doctest::Approx(r));
  CHECK(f.K == doctest::Approx(2.0 / r).epsilon(1e-14));
  CHECK(f.b_z == doctest::Approx(0.0));
  // b is a unit vector
  CHECK(f.b_rho * f.b_rho + f.b_phi * f.b_phi + f.b_z * f.b_z == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("acoustic fields") {
  const auto M = MetricModel::acoustic(-1.0, 10.0);
  const auto f = metric_fields(M, {2.5, 0.0, 0.7});
  CHECK(f.K == doctest::Approx(101.0 / 6.25));
  CHECK(ergosphere_radius(M) == doctest::Approx(std::sqrt(101.0)));
  CHECK_THROWS_AS(metric_fields(M, {0.0, 0.0, 0.0}), DegeneratePoint);
}

TEST_CASE("region classification") {
  const auto K = MetricModel::kerr(1.0, 0.8);
  CHECK(region_classify(K, {3.0, 0, 0}) == Region::Exterior);
  CHECK(region_classify(K, {2.0, 0, 0}) == Region::Ergoregion);
  CHECK(region_classify(K, {1.5, 0, 0}) == Region::BetweenHorizons);
  CHECK(region_classify(K, {0.85, 0, 0}) == Region::InsideInner);
  const auto A = MetricModel::acoustic(-1.0, 10.0);
  CHECK(region_classify(A, {0.5, 0, 0}) == Region::BetweenHorizons);
  CHECK(region_classify(A, {2.0, 0, 0}) == Region::Ergoregion);
  CHECK(region_classify(A, {11.0, 0, 0}) == Region::Exterior);
  const auto N = MetricModel::kerr(1.0, 1.2);
  CHECK(region_classify(N, {1.6, 0, 0}) == Region::Ergoregion);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(MetricModel::kerr(1.0, -0.1), DomainError);
  CHECK_THROWS_AS(MetricModel::kerr(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(MetricModel::acoustic(0.0, 0.0), DomainError);
  CHECK_NOTHROW(MetricModel::acoustic(0.0, 1.0));
}

TEST_CASE("normalized angle") {
  CHECK(SpatialPoint{1, -0.5, 0}.phi_normalized() == doctest::Approx(2 * M_PI - 0.5));
  CHECK(SpatialPoint{1, 7.0, 0}.phi_normalized() == doctest::Approx(7.0 - 2 * M_PI));
}
