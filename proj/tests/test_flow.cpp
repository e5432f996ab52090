#include "riemlab/catalog.hpp"
#include "riemlab/flow.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace riemlab;
using std::numbers::pi;

namespace {

UnitTangentSample sample_at(const ManifoldSpec& spec, const ChartPoint& p, const Vec& u) {
  const Mat g = metric_at(spec, p);
  return {p, orthonormal_basis(g) * u.normalized(), 1.0, 0};
}

UnitTangentSample random_sample(const ManifoldSpec& spec, Rng& rng) {
  const ChartPoint p = spec.sample_point(rng);
  return sample_at(spec, p, uniform_unit_vector(rng, spec.n));
}

ShootOptions steps(int m) {
  ShootOptions o;
  o.steps = m;
  return o;
}

}  // namespace

TEST(Shoot, SphereReachesAntipode) {
  const auto s2 = catalog::round_sphere(2);
  Rng rng = substream(7, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto smp = random_sample(s2, rng);
    const auto rec = shoot(s2, smp, pi);
    const Eigen::VectorXd start = s2.embed(smp.point), end = s2.embed(rec.end_point);
    EXPECT_NEAR((start - end).norm(), 2.0, 1e-6);
    EXPECT_LE(rec.max_speed_drift, 1e-6);
  }
}

TEST(Shoot, FlatTorusIsLinear) {
  const auto t3 = catalog::flat_torus(3);
  Rng rng = substream(3, 1);
  const auto smp = random_sample(t3, rng);
  const auto rec = shoot(t3, smp, 9.0, {.keep_states = true});
  for (int i = 1; i <= rec.steps; i += 97) {
    const Mat& J = rec.states[static_cast<std::size_t>(i)].J;
    EXPECT_NEAR((J - rec.t(i) * Mat::Identity(2, 2)).norm(), 0.0, 1e-12);
  }
  for (double r : {0.3, 2.0, 8.5}) {
    EXPECT_NEAR(jacobian_F(rec, r), r * r, 1e-10 * r * r);
    EXPECT_NEAR(mean_curvature_H(rec, r), 2.0 / r, 1e-9);
    EXPECT_NEAR(truncated_F(rec, r), r * r, 1e-10 * r * r);
  }
  EXPECT_FALSE(rec.conjugate.c);
  EXPECT_NEAR(nested_ric_integral(rec, 0.0, 5.0), 0.0, 1e-12);
}

TEST(Shoot, ThreeSphereJacobiIsSine) {
  const auto s3 = catalog::round_sphere(3);
  Rng rng = substream(11, 2);
  const auto smp = random_sample(s3, rng);
  const auto rec = shoot(s3, smp, 3.0, {.keep_states = true});
  for (int i = 1; i <= rec.steps; i += 61) {
    const Mat& J = rec.states[static_cast<std::size_t>(i)].J;
    EXPECT_NEAR((J - std::sin(rec.t(i)) * Mat::Identity(2, 2)).norm(), 0.0, 1e-6);
  }
  EXPECT_NEAR(jacobian_F(rec, 1.0), 0.708073418273571, 1e-6);
  for (double r : {0.2, 1.0, 2.5}) EXPECT_NEAR(mean_curvature_H(rec, r), 2.0 / std::tan(r), 1e-5);
  EXPECT_NEAR(truncated_F(rec, 1.0), std::sin(1.0) * std::sin(1.0), 1e-6);
  EXPECT_NEAR(nested_ric_integral(rec, 1.0, 2.0), 0.0, 1e-8);
}

TEST(Shoot, RequiresUnitDirection) {
  const auto s2 = catalog::round_sphere(2);
  const Vec theta = Vec::Constant(2, 1.0);
  EXPECT_THROW(shoot(s2, {s2.base_point, theta, 1.0, 0}, 1.0), DomainError);
  const auto smp = sample_at(s2, s2.base_point, Vec::Unit(2, 0));
  EXPECT_THROW(shoot(s2, smp, -1.0), DomainError);
  EXPECT_THROW(shoot(s2, smp, 1.0, {.h = -0.1}), DomainError);
}

TEST(Shoot, StepAdjustedToDivideRadius) {
  const auto s2 = catalog::round_sphere(2);
  const auto smp = sample_at(s2, s2.base_point, Vec::Unit(2, 1));
  const auto rec = shoot(s2, smp, 1.0, {.h = 0.3});
  EXPECT_EQ(rec.steps, 4);
  EXPECT_DOUBLE_EQ(rec.h, 0.25);
  EXPECT_EQ(rec.det.size(), 5u);
}

TEST(Shoot, HyperbolicLocalModelRunsOutOfChart) {
  const auto h2 = catalog::hyperbolic_local(2);
  const auto smp = sample_at(h2, h2.base_point, Vec::Unit(2, 0));
  EXPECT_NO_THROW(shoot(h2, smp, 3.0));
  EXPECT_THROW(shoot(h2, smp, 12.0), IntegrationError);
}

TEST(Shoot, FourthOrderConvergence) {
  const auto s3 = catalog::round_sphere(3);
  const auto smp = sample_at(s3, s3.base_point, Vec::Unit(3, 0));
  const double r = 2.5, exact = std::sin(r) * std::sin(r);
  double previous = 0.0;
  for (int m : {16, 32, 64}) {
    const double err = std::abs(jacobian_F(shoot(s3, smp, r, steps(m)), r) - exact);
    if (previous > 0.0) {
      EXPECT_GT(previous / err, 12.0) << m;
      EXPECT_LT(previous / err, 20.0) << m;
    }
    previous = err;
  }
}

TEST(Shoot, DriftBoundedOverFullTurn) {
  const auto e = catalog::ellipsoid();
  Rng rng = substream(5, 3);
  for (int trial = 0; trial < 4; ++trial) {
    const auto rec = shoot(e, random_sample(e, rng), 2.0 * pi);
    EXPECT_LE(rec.max_speed_drift, 1e-6);
    EXPECT_LE(rec.max_frame_defect, 1e-6);
  }
}

TEST(Shoot, ConstantCurvatureMatchesModel) {
  const auto s4 = catalog::round_sphere(4, 2.0);
  const specialfn::ModelSpaceParams p{0.25, 4};
  Rng rng = substream(9, 4);
  const auto rec = shoot(s4, random_sample(s4, rng), 5.5);
  for (double r : {0.4, 1.7, 3.3, 5.1}) {
    EXPECT_NEAR(jacobian_F(rec, r), specialfn::model_density_Fk(p, r), 1e-5);
    EXPECT_NEAR(mean_curvature_H(rec, r), specialfn::model_mean_curvature(p, r), 1e-5);
  }
}

TEST(Conjugate, SpheresAtPi) {
  for (int n : {2, 3, 4}) {
    const auto s = catalog::round_sphere(n);
    Rng rng = substream(13, static_cast<std::uint64_t>(n));
    const auto rec = shoot(s, random_sample(s, rng), 4.0);
    ASSERT_TRUE(rec.conjugate.c) << n;
    EXPECT_NEAR(*rec.conjugate.c, pi, 1e-3) << n;
    EXPECT_LE(rec.conjugate.lo, *rec.conjugate.c);
    EXPECT_GE(rec.conjugate.hi, *rec.conjugate.c);
    EXPECT_EQ(truncated_F(rec, pi + 0.1), 0.0);
    EXPECT_THROW(mean_curvature_H(rec, pi + 0.1), DomainError);
  }
}

TEST(Conjugate, FlatTorusHasNone) {
  const auto t = catalog::flat_torus(2);
  const auto rec = shoot(t, sample_at(t, t.base_point, Vec::Unit(2, 0)), 20.0);
  EXPECT_FALSE(first_conjugate(rec).c);
}

TEST(Conjugate, ProductAtPiOverCosAlpha) {
  const auto m = catalog::s2xh2();
  for (double alpha : {0.0, 0.3, pi / 4, pi / 3}) {
    Vec u = Vec::Zero(4);
    u[0] = std::cos(alpha);
    u[2] = std::sin(alpha);
    const double c = pi / std::cos(alpha);
    const auto rec = shoot(m, sample_at(m, m.base_point, u), c + 0.5);
    ASSERT_TRUE(rec.conjugate.c) << alpha;
    EXPECT_NEAR(*rec.conjugate.c, c, 1e-3) << alpha;
  }
}

TEST(Functionals, MeanCurvatureMatchesLogDerivative) {
  const auto e = catalog::ellipsoid();
  Rng rng = substream(17, 5);
  for (int trial = 0; trial < 6; ++trial) {
    const double r_max = 2.0;
    const auto rec = shoot(e, random_sample(e, rng), r_max);
    const double r = 0.7 * r_max;
    if (rec.conjugate.c && *rec.conjugate.c < r + 0.01) continue;
    const double d = 1e-3;
    const double fd = (std::log(jacobian_F(rec, r + d)) - std::log(jacobian_F(rec, r - d))) / (2 * d);
    EXPECT_NEAR(mean_curvature_H(rec, r), fd, 1e-4);
  }
}

TEST(Functionals, EllipsoidSmallRadiusTaylor) {
  const auto e = catalog::ellipsoid();
  const double K = curvature(e, e.base_point).scalar / 2.0;
  Rng rng = substream(19, 6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto rec = shoot(e, sample_at(e, e.base_point, uniform_unit_vector(rng, 2)), 0.2);
    for (double r : {0.05, 0.1, 0.2}) {
      const double err = jacobian_F(rec, r) / r - 1.0 + K * r * r / 6.0;
      EXPECT_LT(std::abs(err), 0.5 * std::pow(r, 4)) << r;
    }
  }
}

TEST(Functionals, NestedIntegralOfConstantIsSigma) {
  const auto s3 = catalog::round_sphere(3);
  const auto rec = shoot(s3, sample_at(s3, s3.base_point, Vec::Unit(3, 1)), 3.0);
  // Ric = 2 along every geodesic, so Ric_k = 2 - 2k.
  for (double k : {0.5, 0.0, -1.0}) {
    const specialfn::ModelSpaceParams p{k, 3};
    const double c = 2.0 - 2.0 * k;
    for (double r : {0.5, 1.5, 2.9}) {
      if (k > 0 && r >= specialfn::first_zero(k)) continue;
      const double want = c * specialfn::sigma_k(p, r);
      EXPECT_NEAR(nested_ric_integral(rec, k, r), want, 1e-8 * std::abs(want)) << k << ' ' << r;
    }
  }
  EXPECT_THROW(nested_ric_integral(rec, 1.0, pi), DomainError);
  EXPECT_THROW(nested_ric_integral(rec, 0.0, 0.0), DomainError);
}

TEST(Functionals, SingleIntegralOfConstant) {
  const auto s3 = catalog::round_sphere(3);
  const auto rec = shoot(s3, sample_at(s3, s3.base_point, Vec::Unit(3, 2)), 2.0);
  // With Ric_k = c: c / sin^2 r * (r/2 - sin(2r)/4) for k = 0 means c r / 3.
  EXPECT_NEAR(single_ric_integral(rec, 0.0, 1.2), 2.0 * 1.2 / 3.0, 1e-9);
}

TEST(Functionals, NestedMonotoneWhenRicKNonNegative) {
  const auto e = catalog::ellipsoid();
  const double k = e.meta.ricci_range->lo;
  Rng rng = substream(23, 7);
  const auto rec = shoot(e, random_sample(e, rng), 2.0);
  double last = 0.0;
  for (double r = 0.1; r < 2.0; r += 0.1) {
    const double v = nested_ric_integral(rec, k, r);
    EXPECT_GE(v, last - 1e-12);
    last = v;
  }
}

TEST(Functionals, RecordDump) {
  const auto s2 = catalog::round_sphere(2);
  const auto rec = shoot(s2, sample_at(s2, s2.base_point, Vec::Unit(2, 0)), 1.0, steps(4));
  std::ostringstream os;
  write_record_csv(os, rec, 1.0);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,detJ,H,ric_k");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_NE(text.find("\n0,0,,"), std::string::npos);
}

TEST(Functionals, OutsideRecordThrows) {
  const auto s2 = catalog::round_sphere(2);
  const auto rec = shoot(s2, sample_at(s2, s2.base_point, Vec::Unit(2, 0)), 1.0);
  EXPECT_THROW(jacobian_F(rec, 1.5), DomainError);
  EXPECT_THROW(mean_curvature_H(rec, 0.0), DomainError);
}
