#pragma once

// Interpolation and integration of samples on uniform grids, Gauss-Legendre
// rules, and product quadrature on round spheres.

#include "riemlab/errors.hpp"
#include "riemlab/linalg.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace riemlab::quad {

namespace detail {

// Lagrange weights for nodes 0, 1, 2, 3 evaluated at s.
inline std::array<double, 4> lagrange4(double s) {
  return {-(s - 1) * (s - 2) * (s - 3) / 6.0, s * (s - 2) * (s - 3) / 2.0, -s * (s - 1) * (s - 3) / 2.0,
          s * (s - 1) * (s - 2) / 6.0};
}

inline int last_node(const std::vector<double>& y) { return static_cast<int>(y.size()) - 1; }

// Cubic through the four nodes around interval [i h, (i+1) h], evaluated at t.
inline double interval_cubic(const std::vector<double>& y, double h, int i, double t) {
  const int m = last_node(y);
  const double u = t / h;
  if (m < 3) {
    const double s = u - i;
    return (1 - s) * y[i] + s * y[i + 1];
  }
  const int j = std::clamp(i - 1, 0, m - 3);
  const auto w = lagrange4(u - j);
  return w[0] * y[j] + w[1] * y[j + 1] + w[2] * y[j + 2] + w[3] * y[j + 3];
}

}  // namespace detail

/// Cubic interpolation of y_i = f(i h) using the four nodes around t
/// (one-sided stencils at the ends). Linear for grids with fewer than four nodes.
inline double interpolate(const std::vector<double>& y, double h, double t) {
  const int m = detail::last_node(y);
  if (m < 0) throw DomainError("interpolate: empty grid");
  if (m == 0) return y[0];
  const int i = std::clamp(static_cast<int>(std::floor(t / h)), 0, m - 1);
  return detail::interval_cubic(y, h, i, t);
}

/// C_i = integral of the piecewise cubic interpolant of y over [0, i h].
inline std::vector<double> cumulative(const std::vector<double>& y, double h) {
  const int m = detail::last_node(y);
  std::vector<double> c(y.size(), 0.0);
  for (int i = 0; i < m; ++i) {
    double piece;
    if (m < 3) {
      piece = 0.5 * h * (y[i] + y[i + 1]);
    } else if (i == 0) {
      piece = h * (9 * y[0] + 19 * y[1] - 5 * y[2] + y[3]) / 24.0;
    } else if (i == m - 1) {
      piece = h * (y[m - 3] - 5 * y[m - 2] + 19 * y[m - 1] + 9 * y[m]) / 24.0;
    } else {
      piece = h * (-y[i - 1] + 13 * y[i] + 13 * y[i + 1] - y[i + 2]) / 24.0;
    }
    c[i + 1] = c[i] + piece;
  }
  return c;
}

/// Integral over [0, t] of the same interpolant, given its cumulative table.
/// Beyond the last node the final cubic piece is extrapolated.
inline double integrate_to(const std::vector<double>& y, const std::vector<double>& cum, double h, double t) {
  const int m = detail::last_node(y);
  if (t <= 0.0 || m < 1) return 0.0;
  if (t == m * h) return cum[m];
  const int i = std::clamp(static_cast<int>(std::floor(t / h)), 0, m - 1);
  const double t0 = i * h;
  if (t - t0 <= 0.0) return cum[i];
  // Two-point Gauss is exact for the cubic piece.
  const double half = 0.5 * (t - t0), mid = t0 + half, off = half / std::sqrt(3.0);
  return cum[i] + half * (detail::interval_cubic(y, h, i, mid - off) + detail::interval_cubic(y, h, i, mid + off));
}

inline double integrate(const std::vector<double>& y, double h, double t) {
  return integrate_to(y, cumulative(y, h), h, t);
}

/// Cubic Hermite interpolant on [0, w] with values/derivatives at both ends, evaluated at s.
inline double hermite(double w, double y0, double d0, double y1, double d1, double s) {
  const double u = s / w, u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * w * d0 + (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * w * d1;
}

inline double hermite_derivative(double w, double y0, double d0, double y1, double d1, double s) {
  const double u = s / w, u2 = u * u;
  return ((6 * u2 - 6 * u) * y0 + (-6 * u2 + 6 * u) * y1) / w + (3 * u2 - 4 * u + 1) * d0 + (3 * u2 - 2 * u) * d1;
}

/// Bisection for a sign change of f on [lo, hi]; returns the midpoint of the final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
inline Rule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  Rule r;
  auto add = [&](double x) {
    const double dp = boost::math::legendre_p_prime(order, x);
    r.x.push_back(x);
    r.w.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  };
  for (double z : zeros) {
    if (z == 0.0) {
      add(0.0);
    } else {
      add(-z);
      add(z);
    }
  }
  return r;
}

/// Gauss rule on [-1, 1] for the weight (1 - z^2)^a, a > -1, by Golub-Welsch.
/// Weights are normalized to sum to 1.
inline Rule gauss_gegenbauer(int order, double a) {
  if (order < 1) throw DomainError("gauss_gegenbauer: order must be >= 1");
  if (!(a > -1.0)) throw DomainError("gauss_gegenbauer: exponent must exceed -1");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double s = 2.0 * k + 2.0 * a;
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(k * (k + 2.0 * a) / ((s + 1.0) * (s - 1.0)));
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  Rule r;
  for (int i = 0; i < order; ++i) {
    r.x.push_back(eig.eigenvalues()[i]);
    r.w.push_back(eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i));
  }
  return r;
}

/// Product rule on the unit sphere S^m in R^{m+1}; weights sum to 1.
struct SphereRule {
  int m = 0;
  std::vector<Vec> points;
  std::vector<double> weights;
};

/// Polar recursion: x = (z, sqrt(1 - z^2) y), y on S^{m-1}, with Gauss nodes in z for the
/// weight (1 - z^2)^{(m-2)/2} and the trapezoid rule (2 * order nodes) on S^1.
/// Exact for polynomials of degree below 2 * order.
inline SphereRule sphere_rule(int m, int order) {
  if (m < 0 || m + 1 > kMaxDim) throw DomainError("sphere_rule: unsupported sphere dimension");
  if (order < 1) throw DomainError("sphere_rule: order must be >= 1");
  SphereRule out;
  out.m = m;
  if (m == 0) {
    for (double s : {-1.0, 1.0}) {
      Vec p(1);
      p[0] = s;
      out.points.push_back(p);
      out.weights.push_back(0.5);
    }
    return out;
  }
  if (m == 1) {
    const int count = 2 * order;
    for (int j = 0; j < count; ++j) {
      const double a = 2.0 * std::numbers::pi * j / count;
      Vec p(2);
      p << std::cos(a), std::sin(a);
      out.points.push_back(p);
      out.weights.push_back(1.0 / count);
    }
    return out;
  }
  const SphereRule sub = sphere_rule(m - 1, order);
  const Rule gz = gauss_gegenbauer(order, 0.5 * (m - 2));
  double total = 0.0;
  for (std::size_t a = 0; a < gz.x.size(); ++a) {
    const double z = gz.x[a], rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (std::size_t b = 0; b < sub.points.size(); ++b) {
      Vec p(m + 1);
      p[0] = z;
      p.tail(m) = rho * sub.points[b];
      out.points.push_back(p);
      out.weights.push_back(gz.w[a] * sub.weights[b]);
      total += gz.w[a] * sub.weights[b];
    }
  }
  for (double& w : out.weights) w /= total;
  return out;
}

}  // namespace riemlab::quad
