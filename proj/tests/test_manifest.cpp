#include "riemlab/bundle.hpp"
#include "riemlab/catalog.hpp"
#include "riemlab/manifest.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace riemlab;
using std::numbers::pi;
using nlohmann::json;

namespace {

Vec point(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

json warped(double a) {
  return {{"name", "warped"},
          {"dimension", 2},
          {"chart", {{"lo", {0, 0}}, {"hi", {2 * pi, 2 * pi}}}},
          {"metric", {{"form", "conformal"}, {"factor", "exp(" + std::to_string(2 * a) + " * sin(x))"}}},
          {"injectivity_radius", 1.0}};
}

}  // namespace

TEST(Expression, ArithmeticAndPrecedence) {
  const Vec x = point({0.5, 2.0});
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2 * 3", 2)(x), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2", 2)(x), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2", 2)(x), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("(x + y) / 2", 2)(x), 1.25);
  EXPECT_DOUBLE_EQ(Expression::parse("x0 * x1 - 1e-1", 2)(x), 0.9);
  EXPECT_DOUBLE_EQ(Expression::parse("cos(pi) + exp(0) + sqrt(4)", 2)(x), 2.0);
  EXPECT_NEAR(Expression::parse("sin(x)^2 + cos(x)^2", 2)(x), 1.0, 1e-15);
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression::parse("1 +", 2), ConfigError);
  EXPECT_THROW(Expression::parse("foo(x)", 2), ConfigError);
  EXPECT_THROW(Expression::parse("z", 2), ConfigError);
  EXPECT_THROW(Expression::parse("(x", 2), ConfigError);
  EXPECT_THROW(Expression::parse("x y", 2), ConfigError);
  EXPECT_THROW(Expression::parse("bar", 2), ConfigError);
}

TEST(Manifest, EuclideanMatchesFlatTorus) {
  const json j = {{"name", "flat"},
                  {"dimension", 3},
                  {"chart", {{"lo", {0, 0, 0}}, {"hi", {2 * pi, 2 * pi, 2 * pi}}}},
                  {"metric", {{"form", "euclidean"}}},
                  {"injectivity_radius", pi},
                  {"constant_curvature", 0.0}};
  const auto m = manifest::from_json(j);
  EXPECT_NEAR(*m.meta.volume, std::pow(2 * pi, 3), 1e-11 * std::pow(2 * pi, 3));
  const auto set = build_records(m, sample_sn(m, 20, 1), 4.0);
  for (const auto& r : set.records) EXPECT_NEAR(jacobian_F(r, 3.5), 3.5 * 3.5, 1e-8);
  EXPECT_NEAR(curvature(m, m.base_point).scalar, 0.0, 1e-8);
}

TEST(Manifest, ConformalVolumeAndCurvature) {
  const double a = 0.2;
  const auto m = manifest::from_json(warped(a));
  EXPECT_NEAR(*m.meta.volume, 4 * pi * pi * boost::math::cyl_bessel_i(0, 2 * a), 1e-10);
  // g = e^{2u} I with u = a sin x: K = -e^{-2u} (u_xx + u_yy) = a sin x e^{-2 a sin x}.
  for (double x : {0.3, 1.5, 4.0}) {
    const auto c = curvature(m, {0, point({x, 1.0})});
    EXPECT_NEAR(c.scalar / 2.0, a * std::sin(x) * std::exp(-2 * a * std::sin(x)), 1e-7) << x;
  }
}

TEST(Manifest, SamplerFollowsDensity) {
  const double a = 0.2;
  const auto m = manifest::from_json(warped(a));
  // Mean of sin x under the density e^{2a sin x}: I1(2a) / I0(2a).
  const auto smp = sample_sn(m, 20000, 5);
  std::vector<double> v;
  for (const auto& s : smp) v.push_back(std::sin(s.point.x[0]));
  const auto e = estimate(v);
  const double exact = boost::math::cyl_bessel_i(1, 2 * a) / boost::math::cyl_bessel_i(0, 2 * a);
  EXPECT_NEAR(e.mean, exact, 3 * e.std_error);
}

TEST(Manifest, SamplerBoundViolation) {
  json j = warped(0.2);
  j["sampler"] = {{"density_bound", 0.5}};
  const auto m = manifest::from_json(j);
  Rng rng = substream(1, 0);
  try {
    for (int i = 0; i < 100; ++i) m.sample_point(rng);
    FAIL() << "expected SamplerError";
  } catch (const SamplerError& e) {
    EXPECT_NE(std::string(e.what()).find("ratio"), std::string::npos);
  }
}

TEST(Manifest, MatrixAndDiagonalForms) {
  json j = warped(0.0);
  j["metric"] = {{"form", "matrix"}, {"entries", json::array({json::array({"2", "0.5 * cos(y)"}), json::array({"0.5 * cos(y)", 1})})}};
  const auto m = manifest::from_json(j);
  const Mat g = metric_at(m, {0, point({0.0, 0.0})});
  EXPECT_DOUBLE_EQ(g(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(g(0, 0), 2.0);
  j["metric"] = {{"form", "diagonal"}, {"entries", {"1", "2 + sin(x)"}}};
  const double line = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double x) { return std::sqrt(2.0 + std::sin(x)); }, 0.0, 2 * pi, 15, 1e-14);
  EXPECT_NEAR(*manifest::from_json(j).meta.volume, 2 * pi * line, 1e-10);
}

TEST(Manifest, Rejections) {
  json j = warped(0.1);
  j.erase("injectivity_radius");
  EXPECT_THROW(manifest::from_json(j), ConfigError);
  j = warped(0.1);
  j["chart"]["periodic"] = {true, false};
  EXPECT_THROW(manifest::from_json(j), ConfigError);
  j = warped(0.1);
  j["metric"] = {{"form", "diagonal"}, {"entries", {"1", "sin(x)"}}};
  EXPECT_THROW(manifest::from_json(j), ConfigError);
  j = warped(0.1);
  j["metric"] = {{"form", "matrix"}, {"entries", json::array({json::array({"1", "0.1"}), json::array({"0.2", "1"})})}};
  EXPECT_THROW(manifest::from_json(j), ConfigError);
  j = warped(0.1);
  j["metric"]["form"] = "hyperbolic";
  EXPECT_THROW(manifest::from_json(j), ConfigError);
  j = warped(0.1);
  j["dimension"] = 9;
  EXPECT_THROW(manifest::from_json(j), ConfigError);
  j = warped(0.1);
  j["name"] = 3;
  EXPECT_THROW(manifest::from_json(j), ConfigError);
  EXPECT_THROW(manifest::load("/nonexistent/manifest.json"), ConfigError);
}
