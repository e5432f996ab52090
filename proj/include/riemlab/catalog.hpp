#pragma once

// Built-in manifolds with analytic metadata.

#include "riemlab/manifold.hpp"
#include "riemlab/quadrature.hpp"
#include "riemlab/specialfn.hpp"

#include <boost/math/special_functions/ellint_2.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace riemlab::catalog {

using std::numbers::pi;

namespace detail {

// Christoffel symbols of g = e^{2 phi} delta given d phi.
inline Christoffel conformal_christoffel(const Vec& dphi) {
  const int n = static_cast<int>(dphi.size());
  Christoffel g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        if (i == j) s += dphi[k];
        if (i == k) s += dphi[j];
        if (j == k) s -= dphi[i];
        g(i, j, k) = s;
      }
  return g;
}

inline Mat inversion_jacobian(const Vec& y) {
  const int n = static_cast<int>(y.size());
  const double r2 = y.squaredNorm();
  return (Mat::Identity(n, n) * r2 - 2.0 * y * y.transpose()) / (r2 * r2);
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace detail

/// Round sphere S^n of radius R: stereographic charts from the north pole (0) and
/// the south pole (1), related by inversion z = y / |y|^2.
inline ManifoldSpec round_sphere(int n, double radius = 1.0) {
  if (n < 2 || n + 1 > kMaxDim) throw ConfigError("sphere dimension must be in [2, " + std::to_string(kMaxDim - 1) + "]");
  if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
  ManifoldSpec s;
  s.name = "sphere-" + std::to_string(n);
  if (radius != 1.0) s.name += ":radius=" + detail::fmt(radius);
  s.n = n;
  for (int id = 0; id < 2; ++id) {
    Chart c;
    c.id = id;
    c.lo.assign(n, -1.2);
    c.hi.assign(n, 1.2);
    c.periodic.assign(n, false);
    c.metric = [n, radius](const Vec& y) -> Mat {
      const double f = 2.0 * radius / (1.0 + y.squaredNorm());
      return Mat::Identity(n, n) * (f * f);
    };
    c.christoffel = [](const Vec& y) { return detail::conformal_christoffel(-2.0 * y / (1.0 + y.squaredNorm())); };
    c.inside = [](const Vec& y) { return y.squaredNorm() < 100.0; };
    c.safe = [](const Vec& y) { return y.squaredNorm() <= 1.44; };
    s.charts.push_back(c);
  }
  auto swap_chart = [](const ChartPoint& p) -> std::optional<Transition> {
    const double r2 = p.x.squaredNorm();
    if (r2 < 1e-16) return std::nullopt;
    return Transition{{1 - p.chart, p.x / r2}, detail::inversion_jacobian(p.x)};
  };
  s.relocate = swap_chart;
  s.to_chart = [swap_chart](const ChartPoint& p, int target) -> std::optional<Transition> {
    if (target == p.chart) return Transition{p, Mat::Identity(p.x.size(), p.x.size())};
    if (target != 0 && target != 1) return std::nullopt;
    return swap_chart(p);
  };
  s.embed = [n, radius](const ChartPoint& p) {
    const double r2 = p.x.squaredNorm();
    Eigen::VectorXd x(n + 1);
    for (int i = 0; i < n; ++i) x[i] = 2.0 * p.x[i] / (1.0 + r2);
    x[n] = (p.chart == 0 ? (r2 - 1.0) : (1.0 - r2)) / (r2 + 1.0);
    return Eigen::VectorXd(radius * x);
  };
  s.sample_point = [n](Rng& rng) {
    const Vec u = uniform_unit_vector(rng, n + 1);
    const double last = u[n];
    if (last <= 0.0) return ChartPoint{0, Vec(u.head(n) / (1.0 - last))};
    return ChartPoint{1, Vec(u.head(n) / (1.0 + last))};
  };
  s.base_point = {0, Vec::Zero(n)};
  const double k = 1.0 / (radius * radius);
  s.meta.injectivity_radius = pi * radius;
  s.meta.diameter = pi * radius;
  s.meta.volume = specialfn::area_unit_sphere(n) * std::pow(radius, n);
  s.meta.homogeneous = true;
  s.meta.constant_curvature = k;
  s.meta.ricci_range = Interval{(n - 1) * k, (n - 1) * k};
  s.meta.mean_scalar = n * (n - 1) * k;
  return s;
}

/// Flat torus R^n / (L_1 Z x ... x L_n Z) in one periodic chart.
inline ManifoldSpec flat_torus(int n, std::vector<double> sides = {}) {
  if (n < 2 || n > kMaxDim) throw ConfigError("torus dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  if (sides.empty()) sides.assign(n, 2.0 * pi);
  if (static_cast<int>(sides.size()) == 1) sides.assign(n, sides[0]);
  if (static_cast<int>(sides.size()) != n) throw ConfigError("torus needs one side length per dimension");
  for (double L : sides)
    if (!(L > 0.0)) throw ConfigError("torus side lengths must be positive");
  ManifoldSpec s;
  s.name = "torus-" + std::to_string(n);
  const bool square = std::all_of(sides.begin(), sides.end(), [&](double L) { return L == sides[0]; });
  if (!(square && sides[0] == 2.0 * pi)) {
    s.name += ":side=";
    for (std::size_t i = 0; i < sides.size(); ++i) s.name += (i ? "," : "") + detail::fmt(sides[i]);
  }
  s.n = n;
  Chart c;
  c.lo.assign(n, 0.0);
  c.hi = sides;
  c.periodic.assign(n, true);
  c.metric = [n](const Vec&) -> Mat { return Mat::Identity(n, n); };
  c.christoffel = [n](const Vec&) { return Christoffel(n); };
  c.inside = [](const Vec&) { return true; };
  c.safe = [sides](const Vec& x) {
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < 0.0 || x[i] >= sides[static_cast<std::size_t>(i)]) return false;
    return true;
  };
  c.scale = *std::min_element(sides.begin(), sides.end()) / (2.0 * pi);
  s.charts.push_back(c);
  s.relocate = [sides, n](const ChartPoint& p) -> std::optional<Transition> {
    Vec x = p.x;
    for (int i = 0; i < n; ++i) {
      const double L = sides[static_cast<std::size_t>(i)];
      x[i] -= L * std::floor(x[i] / L);
      if (x[i] >= L) x[i] = 0.0;
    }
    return Transition{{0, x}, Mat::Identity(n, n)};
  };
  s.to_chart = [n](const ChartPoint& p, int target) -> std::optional<Transition> {
    if (target != 0) return std::nullopt;
    return Transition{p, Mat::Identity(n, n)};
  };
  s.sample_point = [sides, n](Rng& rng) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = sides[static_cast<std::size_t>(i)] * uniform01(rng);
    return ChartPoint{0, x};
  };
  Vec center(n);
  double vol = 1.0, diag = 0.0;
  for (int i = 0; i < n; ++i) {
    center[i] = 0.5 * sides[static_cast<std::size_t>(i)];
    vol *= sides[static_cast<std::size_t>(i)];
    diag += sides[static_cast<std::size_t>(i)] * sides[static_cast<std::size_t>(i)];
  }
  s.base_point = {0, center};
  s.meta.injectivity_radius = 0.5 * *std::min_element(sides.begin(), sides.end());
  s.meta.diameter = 0.5 * std::sqrt(diag);
  s.meta.volume = vol;
  s.meta.homogeneous = true;
  s.meta.constant_curvature = 0.0;
  s.meta.ricci_range = Interval{0.0, 0.0};
  s.meta.mean_scalar = 0.0;
  return s;
}

namespace detail {

// Graph chart of the ellipsoid sum (X_i / a_i)^2 = 1 over the coordinate plane
// orthogonal to `axis`, on the side `sign`. Chart id = 2 axis + (sign < 0).
struct EllipsoidGraph {
  std::array<double, 3> a{};
  int axis = 2;
  double sign = 1.0;
  int p = 0, q = 1;  // in-plane axes

  EllipsoidGraph(std::array<double, 3> axes, int ax, double sg) : a(axes), axis(ax), sign(sg) {
    p = ax == 0 ? 1 : 0;
    q = ax == 2 ? 1 : 2;
  }

  double w(const Vec& x) const { return 1.0 - x[0] * x[0] / (a[p] * a[p]) - x[1] * x[1] / (a[q] * a[q]); }

  // Height f and its first and second derivatives.
  void derivatives(const Vec& x, double& f, Vec& df, Mat& ddf) const {
    const double ww = w(x), sw = std::sqrt(ww), A = sign * a[axis];
    const double ap2 = a[p] * a[p], aq2 = a[q] * a[q];
    f = A * sw;
    df.resize(2);
    df << -A * x[0] / (ap2 * sw), -A * x[1] / (aq2 * sw);
    const double w32 = ww * sw;
    ddf.resize(2, 2);
    ddf(0, 0) = -A / (ap2 * sw) - A * x[0] * x[0] / (ap2 * ap2 * w32);
    ddf(1, 1) = -A / (aq2 * sw) - A * x[1] * x[1] / (aq2 * aq2 * w32);
    ddf(0, 1) = ddf(1, 0) = -A * x[0] * x[1] / (ap2 * aq2 * w32);
  }

  Eigen::Vector3d embed(const Vec& x) const {
    Eigen::Vector3d X;
    X[p] = x[0];
    X[q] = x[1];
    X[axis] = sign * a[axis] * std::sqrt(std::max(w(x), 0.0));
    return X;
  }

  // dX / d(x0, x1).
  Eigen::Matrix<double, 3, 2> tangent(const Vec& x) const {
    double f;
    Vec df;
    Mat ddf;
    derivatives(x, f, df, ddf);
    Eigen::Matrix<double, 3, 2> t = Eigen::Matrix<double, 3, 2>::Zero();
    t(p, 0) = 1.0;
    t(q, 1) = 1.0;
    t(axis, 0) = df[0];
    t(axis, 1) = df[1];
    return t;
  }
};

inline int ellipsoid_chart_for(const Eigen::Vector3d& X, const std::array<double, 3>& a) {
  int best = 0;
  double val = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double r = std::abs(X[i] / a[static_cast<std::size_t>(i)]);
    if (r > val) {
      val = r;
      best = i;
    }
  }
  return 2 * best + (X[best] < 0.0 ? 1 : 0);
}

inline double ellipse_perimeter(double x, double y) {
  const double big = std::max(x, y), small = std::min(x, y);
  if (big == small) return 2.0 * pi * big;
  return 4.0 * big * boost::math::ellint_2(std::sqrt(1.0 - small * small / (big * big)));
}

}  // namespace detail

/// Chart point of an embedded point on the ellipsoid, in its best graph chart.
inline ChartPoint ellipsoid_chart_point(const std::array<double, 3>& a, const Eigen::Vector3d& X) {
  const int id = detail::ellipsoid_chart_for(X, a);
  const detail::EllipsoidGraph g(a, id / 2, id % 2 ? -1.0 : 1.0);
  Vec y(2);
  y << X[g.p], X[g.q];
  return {id, y};
}

/// Gaussian curvature of the ellipsoid at an embedded point.
inline double ellipsoid_gauss_curvature(const std::array<double, 3>& a, const Eigen::Vector3d& X) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += X[i] * X[i] / std::pow(a[static_cast<std::size_t>(i)], 4);
  const double abc = a[0] * a[1] * a[2];
  return 1.0 / (abc * abc * s * s);
}

/// Surface area of the ellipsoid: |N| = abc * integral over S^2 of |D^{-1} u|.
inline double ellipsoid_area(const std::array<double, 3>& a, int order = 96) {
  const auto rule = quad::sphere_rule(2, order);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const Vec& u = rule.points[i];
    const double q = std::sqrt(std::pow(u[0] / a[0], 2) + std::pow(u[1] / a[1], 2) + std::pow(u[2] / a[2], 2));
    s += rule.weights[i] * q;
  }
  return 4.0 * pi * a[0] * a[1] * a[2] * s;
}

/// Triaxial ellipsoid surface in R^3, six graph charts (two per coordinate axis).
inline ManifoldSpec ellipsoid(double ax = 1.0, double by = 1.0, double cz = 1.3) {
  const std::array<double, 3> a{ax, by, cz};
  for (double v : a)
    if (!(v > 0.0)) throw ConfigError("ellipsoid semi-axes must be positive");
  ManifoldSpec s;
  s.name = "ellipsoid";
  if (!(ax == 1.0 && by == 1.0 && cz == 1.3)) s.name += ":a=" + detail::fmt(ax) + ",b=" + detail::fmt(by) + ",c=" + detail::fmt(cz);
  s.n = 2;
  std::vector<detail::EllipsoidGraph> graphs;
  for (int axis = 0; axis < 3; ++axis)
    for (double sign : {1.0, -1.0}) graphs.emplace_back(a, axis, sign);
  const double min_axis = *std::min_element(a.begin(), a.end());
  for (int id = 0; id < 6; ++id) {
    const auto gr = graphs[static_cast<std::size_t>(id)];
    Chart c;
    c.id = id;
    c.lo = {-a[static_cast<std::size_t>(gr.p)], -a[static_cast<std::size_t>(gr.q)]};
    c.hi = {a[static_cast<std::size_t>(gr.p)], a[static_cast<std::size_t>(gr.q)]};
    c.periodic = {false, false};
    c.metric = [gr](const Vec& x) -> Mat {
      double f;
      Vec df;
      Mat ddf;
      gr.derivatives(x, f, df, ddf);
      return Mat::Identity(2, 2) + df * df.transpose();
    };
    c.christoffel = [gr](const Vec& x) {
      double f;
      Vec df;
      Mat ddf;
      gr.derivatives(x, f, df, ddf);
      const double denom = 1.0 + df.squaredNorm();
      Christoffel g(2);
      for (int l = 0; l < 2; ++l)
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) g(l, p, q) = df[l] * ddf(p, q) / denom;
      return g;
    };
    c.inside = [gr](const Vec& x) { return gr.w(x) > 1e-6; };
    c.safe = [gr](const Vec& x) { return gr.w(x) >= 0.09; };
    c.scale = min_axis;
    s.charts.push_back(c);
  }
  auto to_chart = [graphs, a](const ChartPoint& pt, int target) -> std::optional<Transition> {
    if (target < 0 || target >= 6) return std::nullopt;
    const auto& from = graphs[static_cast<std::size_t>(pt.chart)];
    if (target == pt.chart) return Transition{pt, Mat::Identity(2, 2)};
    const Eigen::Vector3d X = from.embed(pt.x);
    const auto& to = graphs[static_cast<std::size_t>(target)];
    if (X[to.axis] * to.sign <= 0.0) return std::nullopt;
    Vec y(2);
    y << X[to.p], X[to.q];
    if (to.w(y) <= 1e-6) return std::nullopt;
    const auto t = from.tangent(pt.x);
    Mat jac(2, 2);
    jac.row(0) = t.row(to.p);
    jac.row(1) = t.row(to.q);
    return Transition{{target, y}, jac};
  };
  s.to_chart = to_chart;
  s.relocate = [graphs, a, to_chart](const ChartPoint& pt) -> std::optional<Transition> {
    const Eigen::Vector3d X = graphs[static_cast<std::size_t>(pt.chart)].embed(pt.x);
    return to_chart(pt, detail::ellipsoid_chart_for(X, a));
  };
  s.embed = [graphs](const ChartPoint& pt) {
    return Eigen::VectorXd(graphs[static_cast<std::size_t>(pt.chart)].embed(pt.x));
  };
  s.sample_point = [a, min_axis](Rng& rng) {
    for (;;) {
      const Vec u = uniform_unit_vector(rng, 3);
      const double q = std::sqrt(std::pow(u[0] / a[0], 2) + std::pow(u[1] / a[1], 2) + std::pow(u[2] / a[2], 2));
      if (uniform01(rng) * 1.0 > q * min_axis) continue;
      return ellipsoid_chart_point(a, Eigen::Vector3d(a[0] * u[0], a[1] * u[1], a[2] * u[2]));
    }
  };
  // Base point: the pole on the longest axis.
  const int long_axis = static_cast<int>(std::max_element(a.begin(), a.end()) - a.begin());
  s.base_point = {2 * long_axis, Vec::Zero(2)};

  double kmin = 1e300, kmax = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double ai = a[static_cast<std::size_t>(i)];
    const double aj = a[static_cast<std::size_t>((i + 1) % 3)], ak = a[static_cast<std::size_t>((i + 2) % 3)];
    const double K = ai * ai / (aj * aj * ak * ak);
    kmin = std::min(kmin, K);
    kmax = std::max(kmax, K);
  }
  const double area = ellipsoid_area(a);
  const double shortest = std::min({detail::ellipse_perimeter(a[0], a[1]), detail::ellipse_perimeter(a[1], a[2]),
                                    detail::ellipse_perimeter(a[0], a[2])});
  s.meta.injectivity_radius = std::min(pi / std::sqrt(kmax), 0.5 * shortest);
  s.meta.volume = area;
  s.meta.homogeneous = false;
  if (ax == by && by == cz) s.meta.constant_curvature = 1.0 / (ax * ax);
  s.meta.ricci_range = Interval{kmin, kmax};
  s.meta.mean_scalar = 2.0 * 4.0 * pi / area;
  s.meta.note = "declared injectivity radius is a lower bound (Klingenberg); diameter unknown";
  return s;
}

/// Poincare ball model of hyperbolic space, one chart. Stands in for a closed
/// hyperbolic quotient through homogeneity; volume and injectivity radius are declared.
inline ManifoldSpec hyperbolic_local(int n = 2) {
  if (n != 2) throw ConfigError("hyperbolic local model is provided for n = 2 only");
  ManifoldSpec s;
  s.name = "hyperbolic-2";
  s.n = n;
  Chart c;
  c.lo.assign(n, -1.0);
  c.hi.assign(n, 1.0);
  c.periodic.assign(n, false);
  c.metric = [n](const Vec& x) -> Mat {
    const double f = 2.0 / (1.0 - x.squaredNorm());
    return Mat::Identity(n, n) * (f * f);
  };
  c.christoffel = [](const Vec& x) { return detail::conformal_christoffel(2.0 * x / (1.0 - x.squaredNorm())); };
  c.inside = [](const Vec& x) { return x.squaredNorm() < 1.0; };
  c.safe = [](const Vec& x) { return x.squaredNorm() < 0.998; };
  c.scale = 1.0;
  s.charts.push_back(c);
  s.relocate = [](const ChartPoint&) -> std::optional<Transition> { return std::nullopt; };
  s.to_chart = [n](const ChartPoint& p, int target) -> std::optional<Transition> {
    if (target != 0) return std::nullopt;
    return Transition{p, Mat::Identity(n, n)};
  };
  s.base_point = {0, Vec::Zero(n)};
  s.sample_point = [base = s.base_point](Rng&) { return base; };
  s.embed = [](const ChartPoint& p) { return Eigen::VectorXd(p.x); };
  s.meta.injectivity_radius = 1.0;
  s.meta.volume = 4.0 * pi;  // closed genus-2 surface, Gauss-Bonnet
  s.meta.homogeneous = true;
  s.meta.constant_curvature = -1.0;
  s.meta.ricci_range = Interval{-1.0, -1.0};
  s.meta.mean_scalar = -2.0;
  s.meta.local_model = true;
  s.meta.note = "local homogeneous model of a genus-2 quotient; declared volume 4 pi and injectivity radius 1";
  return s;
}

/// Riemannian product A x B with block-diagonal metric.
inline ManifoldSpec product(const ManifoldSpec& A, const ManifoldSpec& B) {
  if (A.n + B.n > kMaxDim) throw ConfigError("product dimension exceeds " + std::to_string(kMaxDim));
  ManifoldSpec s;
  s.name = A.name + "*" + B.name;
  s.n = A.n + B.n;
  const int na = A.n, nb = B.n, cb = static_cast<int>(B.charts.size());
  auto split = [na, nb, cb](const ChartPoint& p) {
    return std::pair{ChartPoint{p.chart / cb, Vec(p.x.head(na))}, ChartPoint{p.chart % cb, Vec(p.x.tail(nb))}};
  };
  auto join = [na, nb, cb](const ChartPoint& a, const ChartPoint& b) {
    Vec x(na + nb);
    x.head(na) = a.x;
    x.tail(nb) = b.x;
    return ChartPoint{a.chart * cb + b.chart, x};
  };
  auto block = [na, nb](const Mat& ja, const Mat& jb) {
    Mat j = Mat::Zero(na + nb, na + nb);
    j.topLeftCorner(na, na) = ja;
    j.bottomRightCorner(nb, nb) = jb;
    return j;
  };
  for (const Chart& ca : A.charts)
    for (const Chart& cbh : B.charts) {
      Chart c;
      c.id = ca.id * cb + cbh.id;
      c.lo = ca.lo;
      c.lo.insert(c.lo.end(), cbh.lo.begin(), cbh.lo.end());
      c.hi = ca.hi;
      c.hi.insert(c.hi.end(), cbh.hi.begin(), cbh.hi.end());
      c.periodic = ca.periodic;
      c.periodic.insert(c.periodic.end(), cbh.periodic.begin(), cbh.periodic.end());
      c.metric = [ca, cbh, na, nb, block](const Vec& x) -> Mat {
        return block(ca.metric(x.head(na)), cbh.metric(x.tail(nb)));
      };
      c.christoffel = [ca, cbh, na, nb](const Vec& x) {
        const Vec xa = x.head(na), xb = x.tail(nb);
        const Christoffel ga = ca.christoffel ? ca.christoffel(xa) : christoffel_from_metric(ca, xa, na);
        const Christoffel gb = cbh.christoffel ? cbh.christoffel(xb) : christoffel_from_metric(cbh, xb, nb);
        Christoffel g(na + nb);
        for (int i = 0; i < na; ++i)
          for (int j = 0; j < na; ++j)
            for (int k = 0; k < na; ++k) g(i, j, k) = ga(i, j, k);
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j)
            for (int k = 0; k < nb; ++k) g(na + i, na + j, na + k) = gb(i, j, k);
        return g;
      };
      c.inside = [ca, cbh, na, nb](const Vec& x) {
        return (!ca.inside || ca.inside(x.head(na))) && (!cbh.inside || cbh.inside(x.tail(nb)));
      };
      c.safe = [ca, cbh, na, nb](const Vec& x) {
        return (!ca.safe || ca.safe(x.head(na))) && (!cbh.safe || cbh.safe(x.tail(nb)));
      };
      c.scale = std::min(ca.scale, cbh.scale);
      s.charts.push_back(c);
    }
  s.relocate = [A, B, split, join, block](const ChartPoint& p) -> std::optional<Transition> {
    auto [pa, pb] = split(p);
    Transition ta{pa, Mat::Identity(pa.x.size(), pa.x.size())};
    Transition tb{pb, Mat::Identity(pb.x.size(), pb.x.size())};
    const Chart& ca = A.chart(pa.chart);
    const Chart& cbh = B.chart(pb.chart);
    if (ca.safe && !ca.safe(pa.x)) {
      auto t = A.relocate(pa);
      if (!t) return std::nullopt;
      ta = *t;
    }
    if (cbh.safe && !cbh.safe(pb.x)) {
      auto t = B.relocate(pb);
      if (!t) return std::nullopt;
      tb = *t;
    }
    return Transition{join(ta.to, tb.to), block(ta.jacobian, tb.jacobian)};
  };
  s.to_chart = [A, B, split, join, block, cb](const ChartPoint& p, int target) -> std::optional<Transition> {
    auto [pa, pb] = split(p);
    auto ta = A.to_chart(pa, target / cb);
    auto tb = B.to_chart(pb, target % cb);
    if (!ta || !tb) return std::nullopt;
    return Transition{join(ta->to, tb->to), block(ta->jacobian, tb->jacobian)};
  };
  s.sample_point = [A, B, join](Rng& rng) {
    const ChartPoint a = A.sample_point(rng);
    const ChartPoint b = B.sample_point(rng);
    return join(a, b);
  };
  s.base_point = join(A.base_point, B.base_point);
  if (A.embed && B.embed)
    s.embed = [A, B, split](const ChartPoint& p) {
      auto [pa, pb] = split(p);
      const Eigen::VectorXd ea = A.embed(pa), eb = B.embed(pb);
      Eigen::VectorXd e(ea.size() + eb.size());
      e << ea, eb;
      return e;
    };
  const Metadata &ma = A.meta, &mb = B.meta;
  if (ma.injectivity_radius && mb.injectivity_radius)
    s.meta.injectivity_radius = std::min(*ma.injectivity_radius, *mb.injectivity_radius);
  if (ma.diameter && mb.diameter) s.meta.diameter = std::hypot(*ma.diameter, *mb.diameter);
  if (ma.volume && mb.volume) s.meta.volume = *ma.volume * *mb.volume;
  s.meta.homogeneous = ma.homogeneous && mb.homogeneous;
  if (ma.constant_curvature && mb.constant_curvature && *ma.constant_curvature == 0.0 && *mb.constant_curvature == 0.0)
    s.meta.constant_curvature = 0.0;
  if (ma.ricci_range && mb.ricci_range)
    s.meta.ricci_range = Interval{std::min(ma.ricci_range->lo, mb.ricci_range->lo),
                                  std::max(ma.ricci_range->hi, mb.ricci_range->hi)};
  if (ma.mean_scalar && mb.mean_scalar) s.meta.mean_scalar = *ma.mean_scalar + *mb.mean_scalar;
  s.meta.local_model = ma.local_model || mb.local_model;
  if (s.meta.local_model) s.meta.note = "product with a local homogeneous model; declared volume";
  return s;
}

/// S^2(1) x (H^2 / Gamma) through the local homogeneous model.
inline ManifoldSpec s2xh2() {
  ManifoldSpec s = product(round_sphere(2), hyperbolic_local(2));
  s.name = "s2xh2";
  return s;
}

namespace detail {

inline std::map<std::string, std::string> parse_options(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  // Options are comma separated key=value pairs; a value may itself hold commas
  // (torus side lists), so bare items are appended to the previous value.
  std::string last;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (last.empty()) throw ConfigError("malformed manifold option '" + item + "'");
      out[last] += "," + item;
      continue;
    }
    last = item.substr(0, eq);
    out[last] = item.substr(eq + 1);
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("manifold option " + key + " is not a number: '" + v + "'");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

inline void reject_unknown(const std::map<std::string, std::string>& opts, std::initializer_list<const char*> known,
                           const std::string& name) {
  for (const auto& [k, v] : opts) {
    bool ok = false;
    for (const char* kn : known) ok = ok || k == kn;
    if (!ok) throw ConfigError("unknown option '" + k + "' for manifold " + name);
  }
}

}  // namespace detail

/// Names accepted by make(): sphere-N[:radius=R], torus-N[:side=L or L1,L2,..],
/// ellipsoid[:a=,b=,c=], hyperbolic-2, s2xh2, product:A*B.
inline ManifoldSpec make(const std::string& name) {
  if (name.rfind("product:", 0) == 0) {
    const std::string body = name.substr(8);
    const auto star = body.find('*');
    if (star == std::string::npos) throw ConfigError("product needs the form product:A*B");
    return product(make(body.substr(0, star)), make(body.substr(star + 1)));
  }
  const auto colon = name.find(':');
  const std::string base = name.substr(0, colon);
  const auto opts = colon == std::string::npos ? std::map<std::string, std::string>{}
                                               : detail::parse_options(name.substr(colon + 1));
  auto get = [&](const char* key, double def) {
    auto it = opts.find(key);
    return it == opts.end() ? def : detail::parse_double(key, it->second);
  };
  if (base.rfind("sphere-", 0) == 0) {
    detail::reject_unknown(opts, {"radius"}, base);
    const int n = static_cast<int>(detail::parse_double("dimension", base.substr(7)));
    return round_sphere(n, get("radius", 1.0));
  }
  if (base.rfind("torus-", 0) == 0) {
    detail::reject_unknown(opts, {"side"}, base);
    const int n = static_cast<int>(detail::parse_double("dimension", base.substr(6)));
    auto it = opts.find("side");
    return flat_torus(n, it == opts.end() ? std::vector<double>{} : detail::parse_list("side", it->second));
  }
  if (base == "ellipsoid") {
    detail::reject_unknown(opts, {"a", "b", "c"}, base);
    return ellipsoid(get("a", 1.0), get("b", 1.0), get("c", 1.3));
  }
  if (base == "hyperbolic-2") {
    detail::reject_unknown(opts, {}, base);
    return hyperbolic_local(2);
  }
  if (base == "s2xh2") {
    detail::reject_unknown(opts, {}, base);
    return s2xh2();
  }
  throw ConfigError("unknown manifold '" + name + "'");
}

inline std::vector<std::string> builtin_names() {
  return {"sphere-2", "sphere-3", "sphere-4", "torus-2", "torus-3", "ellipsoid", "hyperbolic-2", "s2xh2"};
}

}  // namespace riemlab::catalog
