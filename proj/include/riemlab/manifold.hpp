#pragma once

// Chart-based closed manifolds: metric, Christoffel symbols, curvature.

#include "riemlab/errors.hpp"
#include "riemlab/linalg.hpp"
#include "riemlab/rng.hpp"

#include <Eigen/Cholesky>

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace riemlab {

struct ChartPoint {
  int chart = 0;
  Vec x;
};

struct Chart {
  int id = 0;
  /// Coordinate box; periodic axes are identified modulo (hi - lo).
  std::vector<double> lo, hi;
  std::vector<bool> periodic;
  std::function<Mat(const Vec&)> metric;
  /// Closed-form Christoffel symbols. Empty means finite differences of the metric.
  std::function<Christoffel(const Vec&)> christoffel;
  /// Open domain on which the metric is defined.
  std::function<bool(const Vec&)> inside;
  /// Sub-domain where integration may continue without changing chart.
  std::function<bool(const Vec&)> safe;
  /// Coordinate length scale; finite-difference steps are 1e-4 of it.
  double scale = 1.0;
};

/// Change of chart: the same point in another chart and d(new)/d(old).
struct Transition {
  ChartPoint to;
  Mat jacobian;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Metadata {
  std::optional<double> injectivity_radius;
  std::optional<double> diameter;
  std::optional<double> volume;
  bool homogeneous = false;
  std::optional<double> constant_curvature;
  /// Range of Ric(theta, theta) over the unit sphere bundle, when known exactly.
  std::optional<Interval> ricci_range;
  /// Exact average of the scalar curvature, when known.
  std::optional<double> mean_scalar;
  /// Local model standing in for a quotient; volume is declared, not computed.
  bool local_model = false;
  std::string note;
};

struct ManifoldSpec {
  std::string name;
  int n = 0;
  std::vector<Chart> charts;
  Metadata meta;
  /// Draws a point distributed by normalized Riemannian volume.
  std::function<ChartPoint(Rng&)> sample_point;
  /// Reference point; homogeneous manifolds are sampled here only.
  ChartPoint base_point;
  /// Moves a point outside its chart's safe region into a better chart
  /// (or wraps a periodic coordinate). Returns nothing when no chart helps.
  std::function<std::optional<Transition>(const ChartPoint&)> relocate;
  /// Expresses a point in a given chart, when it lies in that chart's domain.
  std::function<std::optional<Transition>(const ChartPoint&, int)> to_chart;
  /// Optional embedding into Euclidean space, for tests and diagnostics.
  std::function<Eigen::VectorXd(const ChartPoint&)> embed;

  const Chart& chart(int id) const { return charts.at(static_cast<std::size_t>(id)); }
};

inline constexpr double kFiniteDifferenceStep = 1e-4;
inline constexpr double kUnitTolerance = 1e-8;

inline Mat metric_at(const ManifoldSpec& spec, const ChartPoint& p) {
  const Chart& c = spec.chart(p.chart);
  if (c.inside && !c.inside(p.x)) throw DomainError("point outside the domain of chart " + std::to_string(p.chart));
  return c.metric(p.x);
}

inline Eigen::LLT<Mat> factor_metric(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all())
    throw SingularMetricError("metric is not positive definite");
  return llt;
}

/// Columns form a g-orthonormal basis: B = L^{-T} where g = L L^T.
inline Mat orthonormal_basis(const Mat& g) {
  const auto llt = factor_metric(g);
  Mat lt = llt.matrixU();
  return lt.inverse();
}

inline double norm_sq(const Mat& g, const Vec& v) { return v.dot(g * v); }

namespace detail {

// f at x + e, x - e, x + 2e, x - 2e along axis k. The Richardson-extrapolated
// derivative (4 D(e) - D(2e)) / 3 is (8 (f0 - f1) - (f2 - f3)) / (12 e).
template <class F>
auto stencil(F&& f, const Vec& x, int k, double eps) {
  Vec a = x, b = x, c = x, d = x;
  a[k] += eps;
  b[k] -= eps;
  c[k] += 2 * eps;
  d[k] -= 2 * eps;
  auto fa = f(a);
  auto fb = f(b);
  auto fc = f(c);
  auto fd = f(d);
  return std::array{fa, fb, fc, fd};
}

}  // namespace detail

/// Christoffel symbols from the metric by finite differences.
inline Christoffel christoffel_from_metric(const Chart& chart, const Vec& x, int n) {
  const double eps = kFiniteDifferenceStep * chart.scale;
  std::array<Mat, kMaxDim> dg;
  for (int k = 0; k < n; ++k) {
    auto v = detail::stencil(chart.metric, x, k, eps);
    dg[k] = (8.0 * (v[0] - v[1]) - (v[2] - v[3])) / (12.0 * eps);
  }
  const Mat g = chart.metric(x);
  const auto llt = factor_metric(g);
  const Mat ginv = llt.solve(Mat::Identity(n, n));
  Christoffel gamma(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(i, l) * (dg[j](l, k) + dg[k](j, l) - dg[l](j, k));
        gamma(i, j, k) = gamma(i, k, j) = 0.5 * s;
      }
  return gamma;
}

inline Christoffel christoffel_in_chart(const ManifoldSpec& spec, const Chart& chart, const Vec& x) {
  if (chart.christoffel) return chart.christoffel(x);
  return christoffel_from_metric(chart, x, spec.n);
}

inline Christoffel christoffel(const ManifoldSpec& spec, const ChartPoint& p) {
  const Chart& c = spec.chart(p.chart);
  if (c.inside && !c.inside(p.x)) throw DomainError("point outside the domain of chart " + std::to_string(p.chart));
  return christoffel_in_chart(spec, c, p.x);
}

/// dGamma[k] = d/dx^k of the Christoffel symbols (Richardson central differences).
using ChristoffelDerivatives = std::array<Christoffel, kMaxDim>;

inline ChristoffelDerivatives christoffel_derivatives(const ManifoldSpec& spec, const Chart& chart, const Vec& x) {
  const double eps = kFiniteDifferenceStep * chart.scale;
  ChristoffelDerivatives d;
  auto gamma = [&](const Vec& y) { return christoffel_in_chart(spec, chart, y); };
  for (int k = 0; k < spec.n; ++k) {
    auto v = detail::stencil(gamma, x, k, eps);
    Christoffel acc = v[0] - v[1];
    acc *= 8.0;
    Christoffel far = v[2] - v[3];
    far *= -1.0;
    acc += far;
    acc *= 1.0 / (12.0 * eps);
    d[k] = acc;
  }
  return d;
}

/// R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}.
inline Riemann riemann_from(const Christoffel& g, const ChristoffelDerivatives& dg, int n) {
  Riemann r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          double s = dg[k](i, l, j) - dg[l](i, k, j);
          for (int m = 0; m < n; ++m) s += g(i, k, m) * g(m, l, j) - g(i, l, m) * g(m, k, j);
          r(i, j, k, l) = s;
          r(i, j, l, k) = -s;
        }
  return r;
}

/// Jacobi operator M^i_k = R^i_{jkl} v^j v^l, so that J'' = -M J along a geodesic
/// with velocity v. Assembled from Gamma and dGamma without forming Riemann.
inline Mat jacobi_operator(const Christoffel& g, const ChristoffelDerivatives& dg, const Vec& v, int n) {
  const Mat b = g.contract_last(v);  // B^i_m = G^i_{mj} v^j
  const Vec gvv = b * v;             // G(v, v)
  Christoffel dir(n);                // sum_l v^l d_l G
  for (int l = 0; l < n; ++l) {
    Christoffel t = dg[l];
    t *= v[l];
    dir += t;
  }
  const Mat dir_b = dir.contract_last(v);
  Mat m(n, n);
  for (int k = 0; k < n; ++k) m.col(k) = dg[k].contract(v, v);  // d_k (G(v, v))
  m -= dir_b;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int q = 0; q < n; ++q) s += g(i, k, q) * gvv[q];
      m(i, k) += s;
    }
  m -= b * b;
  return m;
}

struct CurvatureAtPoint {
  Riemann riemann;
  Mat ricci;
  double scalar = 0.0;
  Mat metric;
  ChartPoint point;
};

inline CurvatureAtPoint curvature(const ManifoldSpec& spec, const ChartPoint& p) {
  const Chart& c = spec.chart(p.chart);
  if (c.inside && !c.inside(p.x)) throw DomainError("point outside the domain of chart " + std::to_string(p.chart));
  const int n = spec.n;
  CurvatureAtPoint out;
  out.point = p;
  out.metric = c.metric(p.x);
  const auto llt = factor_metric(out.metric);
  const Christoffel g = christoffel_in_chart(spec, c, p.x);
  const auto dg = christoffel_derivatives(spec, c, p.x);
  out.riemann = riemann_from(g, dg, n);
  out.ricci = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += out.riemann(i, j, i, l);
      out.ricci(j, l) = s;
    }
  out.ricci = 0.5 * (out.ricci + out.ricci.transpose()).eval();
  const Mat ginv = llt.solve(Mat::Identity(n, n));
  out.scalar = (ginv.cwiseProduct(out.ricci)).sum();
  return out;
}

inline void require_unit(const Mat& g, const Vec& theta) {
  const double q = norm_sq(g, theta);
  if (std::abs(q - 1.0) > kUnitTolerance)
    throw DomainError("direction is not unit length (|theta|^2 = " + std::to_string(q) + ")");
}

/// Ric(theta, theta) for a g-unit theta.
inline double ricci_along(const CurvatureAtPoint& c, const Vec& theta) {
  require_unit(c.metric, theta);
  return theta.dot(c.ricci * theta);
}

/// Ric_k(theta, theta) = Ric(theta, theta) - (n - 1) k.
inline double ric_k(const CurvatureAtPoint& c, const Vec& theta, double k) {
  const int n = static_cast<int>(theta.size());
  return ricci_along(c, theta) - (n - 1) * k;
}

/// Negative part max(-Ric(theta, theta), 0).
inline double ric_minus(const CurvatureAtPoint& c, const Vec& theta) {
  return std::max(-ricci_along(c, theta), 0.0);
}

inline double ric_k(const ManifoldSpec& spec, const ChartPoint& p, const Vec& theta, double k) {
  return ric_k(curvature(spec, p), theta, k);
}

inline double ric_minus(const ManifoldSpec& spec, const ChartPoint& p, const Vec& theta) {
  return ric_minus(curvature(spec, p), theta);
}

}  // namespace riemlab
