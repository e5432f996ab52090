#include "riemlab/bundle.hpp"
#include "riemlab/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace riemlab;
using std::numbers::pi;

namespace {

ShootOptions steps(int m) {
  ShootOptions o;
  o.steps = m;
  return o;
}

// Paired standard error of the per-record difference of two functionals.
template <class A, class B>
double paired_se(const RecordSet& set, A&& a, B&& b) {
  std::vector<double> d;
  for (const auto& r : set.records) d.push_back(a(r) - b(r));
  return estimate(d).std_error;
}

}  // namespace

TEST(Sampling, UnitDirections) {
  const auto e = catalog::ellipsoid();
  for (const auto& s : sample_sn(e, 500, 42)) EXPECT_NEAR(norm_sq(metric_at(e, s.point), s.theta), 1.0, 1e-10);
}

TEST(Sampling, DeterministicAcrossThreadCounts) {
  const auto e = catalog::ellipsoid();
  const auto a = sample_sn(e, 64, 99, 1);
  const auto b = sample_sn(e, 64, 99, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].point.chart, b[i].point.chart);
    EXPECT_TRUE(a[i].point.x == b[i].point.x);
    EXPECT_TRUE(a[i].theta == b[i].theta);
  }
  const auto ra = build_records(e, a, 1.0, steps(128), 1, 99);
  const auto rb = build_records(e, b, 1.0, steps(128), 3, 99);
  EXPECT_EQ(average_area(ra, 0.7).mean, average_area(rb, 0.7).mean);
  EXPECT_EQ(average_H(ra, 0.7).mean, average_H(rb, 0.7).mean);
  EXPECT_EQ(truncated_volume(ra, 0.9).mean, truncated_volume(rb, 0.9).mean);
}

TEST(Sampling, HomogeneousFixesPoint) {
  const auto s3 = catalog::round_sphere(3);
  for (const auto& s : sample_sn(s3, 20, 1)) {
    EXPECT_EQ(s.point.chart, s3.base_point.chart);
    EXPECT_TRUE(s.point.x == s3.base_point.x);
  }
}

TEST(Sampling, RejectsEmpty) {
  EXPECT_THROW(sample_sn(catalog::round_sphere(2), 0, 1), DomainError);
}

TEST(Sampling, FiberAverageOfRicciIsScalarOverN) {
  const auto e = catalog::ellipsoid();
  Rng rng = substream(4, 4);
  const ChartPoint p = e.sample_point(rng);
  const auto c = curvature(e, p);
  std::vector<double> v;
  for (const auto& s : sample_fiber(e, p, 4000, 8)) v.push_back(ricci_along(c, s.theta));
  const auto est = estimate(v);
  EXPECT_NEAR(est.mean, c.scalar / 2.0, 3 * est.std_error + 1e-12);
}

TEST(Estimate, MeanAndStandardError) {
  const auto e = estimate({1.0, 2.0, 3.0, 4.0}, 5);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.count, 4u);
  EXPECT_EQ(e.seed, 5u);
}

TEST(AverageScalar, ThreeSphere) {
  const auto s3 = catalog::round_sphere(3);
  const auto smp = sample_sn(s3, 200, 3);
  EXPECT_NEAR(average_scalar(s3, smp).mean, 6.0, 1e-6);
  EXPECT_NEAR(average_scalar_points(s3, smp).mean, 6.0, 1e-6);
}

TEST(AverageScalar, ProductIsScalarFlat) {
  const auto m = catalog::s2xh2();
  const auto smp = sample_sn(m, 2000, 5);
  const auto fiber = average_scalar(m, smp);
  EXPECT_NEAR(fiber.mean, 0.0, 3 * fiber.std_error);
  EXPECT_NEAR(average_scalar_points(m, smp).mean, 0.0, 1e-6);
}

TEST(AverageScalar, EllipsoidMatchesQuadrature) {
  const auto e = catalog::ellipsoid();
  const auto smp = sample_sn(e, 4000, 6, 0);
  const auto fiber = average_scalar(e, smp);
  const auto point = average_scalar_points(e, smp);
  const double exact = *e.meta.mean_scalar;
  EXPECT_NEAR(fiber.mean, exact, 3 * fiber.std_error);
  EXPECT_NEAR(point.mean, exact, 3 * point.std_error);
  EXPECT_NEAR(fiber.mean, point.mean, 3 * std::hypot(fiber.std_error, point.std_error));
}

TEST(Liouville, FlatTorusIsZero) {
  const auto t = catalog::flat_torus(3);
  const auto set = build_records(t, sample_sn(t, 50, 1), 2.0, steps(64));
  for (const auto& e : liouville_check(set, {0.0, 0.7, 2.0}, 0.0)) EXPECT_EQ(e.mean, 0.0);
}

TEST(Liouville, ThreeSphereConstant) {
  const auto s3 = catalog::round_sphere(3);
  const auto set = build_records(s3, sample_sn(s3, 50, 1), 1.0, steps(128));
  for (const auto& e : liouville_check(set, {0.0, 0.5, 1.0}, 0.0)) EXPECT_NEAR(e.mean, 2.0, 1e-6);
}

TEST(Liouville, EllipsoidInvariant) {
  const auto e = catalog::ellipsoid();
  const auto set = build_records(e, sample_sn(e, 3000, 12, 0), 0.7, steps(128), 0);
  const std::vector<double> ts{0.0, 0.3, 0.7};
  const auto table = liouville_check(set, ts, 0.0);
  const double rbar_over_n = *e.meta.mean_scalar / 2.0;
  for (std::size_t a = 0; a < ts.size(); ++a) {
    EXPECT_NEAR(table[a].mean, rbar_over_n, 3 * table[a].std_error) << ts[a];
    for (std::size_t b = a + 1; b < ts.size(); ++b) {
      auto at = [&](double t) { return [&, t](const GeodesicRecord& r) { return quad::interpolate(r.ric, r.h, t); }; };
      const double se = paired_se(set, at(ts[a]), at(ts[b]));
      EXPECT_NEAR(table[a].mean, table[b].mean, 3 * se) << ts[a] << ' ' << ts[b];
    }
  }
}

TEST(Averages, ThreeSphereModelValues) {
  const auto s3 = catalog::round_sphere(3);
  const auto set = build_records(s3, sample_sn(s3, 40, 2), 3.5);
  EXPECT_NEAR(average_area(set, 1.0).mean, 4 * pi * std::pow(std::sin(1.0), 2), 1e-5);
  EXPECT_NEAR(truncated_volume(set, pi / 2).mean, pi * pi, 1e-5);
  EXPECT_NEAR(truncated_volume(set, pi + 0.2).mean, 2 * pi * pi, 1e-4);
  EXPECT_NEAR(average_log_ratio(set, 1.0, 1.0).mean, 0.0, 1e-6);
  EXPECT_NEAR(min_F(set, 1.0), std::pow(std::sin(1.0), 2), 1e-6);
  EXPECT_THROW(average_area(set, 3.2), DomainError);
}

TEST(Averages, FlatTorusModelValues) {
  const auto t = catalog::flat_torus(3);
  const auto set = build_records(t, sample_sn(t, 40, 2), 2.0, steps(256));
  const double r = 1.5;
  EXPECT_NEAR(average_area(set, r).mean, 4 * pi * r * r, 1e-9);
  EXPECT_NEAR(truncated_volume(set, r).mean, 4 * pi * r * r * r / 3, 1e-9);
  EXPECT_NEAR(average_H(set, r).mean, 2.0 / r, 1e-9);
}

TEST(Averages, EllipsoidAreaMatchesGridQuadrature) {
  const auto e = catalog::ellipsoid();
  const std::array<double, 3> a{1.0, 1.0, 1.3};
  const double r = 0.5;
  // Surface integral via X = D u on S^2, dA = abc |D^{-1} u| d(omega).
  const auto rule = quad::sphere_rule(2, 10);
  const int fibers = 16;
  double total = 0.0, weight = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const Vec& u = rule.points[i];
    const double q = std::sqrt(std::pow(u[0] / a[0], 2) + std::pow(u[1] / a[1], 2) + std::pow(u[2] / a[2], 2));
    const ChartPoint p = catalog::ellipsoid_chart_point(a, {a[0] * u[0], a[1] * u[1], a[2] * u[2]});
    const Mat basis = orthonormal_basis(metric_at(e, p));
    double fiber = 0.0;
    for (int j = 0; j < fibers; ++j) {
      const double phi = 2 * pi * j / fibers;
      const Vec theta = basis * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      fiber += jacobian_F(shoot(e, {p, theta, 1.0, 0}, r, steps(64)), r) / fibers;
    }
    total += rule.weights[i] * q * fiber;
    weight += rule.weights[i] * q;
  }
  const double grid = 2 * pi * total / weight;
  const auto set = build_records(e, sample_sn(e, 2000, 21, 0), r, steps(64), 0);
  const auto mc = average_area(set, r);
  EXPECT_NEAR(mc.mean, grid, 3 * mc.std_error + 1e-6);
}

TEST(Averages, VolumeDerivativeIsArea) {
  const auto e = catalog::ellipsoid();
  const auto set = build_records(e, sample_sn(e, 200, 31), 1.0, steps(512));
  const double r = 0.6, d = 1e-3;
  const double dv = (truncated_volume(set, r + d).mean - truncated_volume(set, r - d).mean) / (2 * d);
  const double area = average_area(set, r).mean;
  EXPECT_NEAR(dv / area, 1.0, 1e-3);
}

TEST(Averages, HomogeneousFiberEqualsFullBundle) {
  const auto s3 = catalog::round_sphere(3);
  const auto full = build_records(s3, sample_sn(s3, 16, 8), 1.0, steps(128));
  const auto fiber = build_records(s3, sample_fiber(s3, s3.base_point, 16, 8), 1.0, steps(128));
  EXPECT_EQ(average_H(full, 0.8).mean, average_H(fiber, 0.8).mean);
}

TEST(Averages, WeightedRuleIsExactForConstantCurvature) {
  const auto s2 = catalog::round_sphere(2);
  const auto rule = quad::sphere_rule(1, 4);
  const auto set = build_records(s2, fiber_rule(s2, s2.base_point, rule, Mat::Identity(2, 2)), 1.0, steps(256));
  EXPECT_TRUE(set.weighted());
  const auto h = average_H(set, 0.5);
  EXPECT_NEAR(h.mean, 1.0 / std::tan(0.5), 1e-6);
  EXPECT_EQ(h.std_error, 0.0);
}
