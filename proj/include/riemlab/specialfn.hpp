#pragma once

// Closed-form kernels of the constant-curvature model spaces.
//
// Every kernel is continuous in k across k = 0: near the flat limit the
// trigonometric/hyperbolic branches lose digits to cancellation, so they are
// replaced by truncated Taylor series in x = k t^2.

#include "riemlab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace riemlab::specialfn {

/// Series switch for s_k and s_k': |k| t^2 at or below this uses the series.
inline constexpr double kSeriesThreshold = 1e-6;

/// Series switch for phi_k, sigma_k, psi_k (|k| r^2). These kernels cancel
/// harder than s_k, so they carry a longer series out to a wider threshold.
inline constexpr double kKernelSeriesThreshold = 0.05;

/// Below this width the chord through (m1, e^m1), (m2, e^m2) is replaced by the tangent at the midpoint.
inline constexpr double kChordDegenerateWidth = 1e-8;

struct ModelSpaceParams {
  double k = 0.0;
  int n = 2;
};

inline void validate(const ModelSpaceParams& p) {
  if (p.n < 2) throw DomainError("model space dimension must be >= 2, got " + std::to_string(p.n));
  if (!std::isfinite(p.k)) throw DomainError("curvature constant k must be finite");
}

/// pi / sqrt(k) for k > 0, +inf otherwise.
inline double first_zero(double k) {
  return k > 0.0 ? std::numbers::pi / std::sqrt(k) : std::numeric_limits<double>::infinity();
}

/// |S^m|, the m-dimensional area of the unit sphere in R^{m+1}.
inline double area_unit_sphere(int m) {
  using std::numbers::pi;
  static const std::array<double, 9> table = {
      2.0,                         // S^0
      2.0 * pi,                    // S^1
      4.0 * pi,                    // S^2
      2.0 * pi * pi,               // S^3
      8.0 * pi * pi / 3.0,         // S^4
      pi * pi * pi,                // S^5
      16.0 * pi * pi * pi / 15.0,  // S^6
      pi * pi * pi * pi / 3.0,     // S^7
      32.0 * pi * pi * pi * pi / 105.0,
  };
  if (m < 0) throw DomainError("sphere dimension must be non-negative");
  if (m < static_cast<int>(table.size())) return table[static_cast<std::size_t>(m)];
  const double h = 0.5 * (m + 1);
  return 2.0 * std::pow(pi, h) / std::tgamma(h);
}

inline double s_k(const ModelSpaceParams& p, double t) {
  const double x = p.k * t * t;
  if (std::abs(x) <= kSeriesThreshold) return t * (1.0 - x / 6.0 + x * x / 120.0);
  if (p.k > 0.0) {
    const double q = std::sqrt(p.k);
    return std::sin(q * t) / q;
  }
  const double q = std::sqrt(-p.k);
  return std::sinh(q * t) / q;
}

inline double s_k_prime(const ModelSpaceParams& p, double t) {
  const double x = p.k * t * t;
  if (std::abs(x) <= kSeriesThreshold) return 1.0 - x / 2.0 + x * x / 24.0;
  if (p.k > 0.0) return std::cos(std::sqrt(p.k) * t);
  return std::cosh(std::sqrt(-p.k) * t);
}

/// F_k(r) = s_k(r)^{n-1}, the polar volume density of the model space.
inline double model_density_Fk(const ModelSpaceParams& p, double r) {
  validate(p);
  return std::pow(s_k(p, r), p.n - 1);
}

/// A_k(r) = |S^{n-1}| F_k(r).
inline double model_area(const ModelSpaceParams& p, double r) {
  return area_unit_sphere(p.n - 1) * model_density_Fk(p, r);
}

/// V_k(r) = integral of A_k over [0, r]. For k > 0, r is clamped to pi/sqrt(k).
inline double model_volume(const ModelSpaceParams& p, double r) {
  validate(p);
  if (r <= 0.0) return 0.0;
  r = std::min(r, first_zero(p.k));
  constexpr int panels = 8;
  const double w = r / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = i * w;
    total += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double t) { return std::pow(s_k(p, t), p.n - 1); }, lo, lo + w);
  }
  return area_unit_sphere(p.n - 1) * total;
}

/// F_k'(r) / F_k(r) = (n - 1) s_k'(r) / s_k(r), the mean curvature of a model geodesic sphere.
inline double model_mean_curvature(const ModelSpaceParams& p, double r) {
  validate(p);
  if (r <= 0.0) throw DomainError("model mean curvature needs r > 0");
  return (p.n - 1) * s_k_prime(p, r) / s_k(p, r);
}

namespace detail {

inline void check_kernel_domain(const ModelSpaceParams& p, double r, const char* what) {
  validate(p);
  if (!(r > 0.0)) throw DomainError(std::string(what) + " needs r > 0");
  if (p.k > 0.0 && r >= first_zero(p.k))
    throw DomainError(std::string(what) + " needs r < pi/sqrt(k); got r = " + std::to_string(r) +
                      ", k = " + std::to_string(p.k));
}

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double acc = 0.0;
  for (std::size_t i = N; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Taylor coefficients in x = k r^2.
inline constexpr std::array<double, 7> kPhiSeries = {
    1.0 / 3.0,         2.0 / 45.0,           2.0 / 315.0,        4.0 / 4725.0,
    2.0 / 18711.0,     2764.0 / 212837625.0, 4.0 / 2606175.0,
};
inline constexpr std::array<double, 7> kSigmaSeries = {
    1.0 / 6.0,         1.0 / 90.0,            1.0 / 945.0,         1.0 / 9450.0,
    1.0 / 93555.0,     691.0 / 638512875.0,   2.0 / 18243225.0,
};

}  // namespace detail

/// phi_k(r) = integral over [0, r] of s_k(t)^2 / s_k(r)^2.
inline double phi_k(const ModelSpaceParams& p, double r) {
  detail::check_kernel_domain(p, r, "phi_k");
  const double x = p.k * r * r;
  if (std::abs(x) <= kKernelSeriesThreshold) return r * detail::horner(detail::kPhiSeries, x);
  if (p.k > 0.0) {
    const double q = std::sqrt(p.k);
    const double sn = std::sin(q * r);
    return 0.5 * (r / (sn * sn) - std::cos(q * r) / (sn * q));
  }
  const double q = std::sqrt(-p.k);
  const double sh = std::sinh(q * r);
  return 0.5 * (std::cosh(q * r) / (sh * q) - r / (sh * sh));
}

/// sigma_k(r) = double integral of s_k(t)^2 / s_k(tau)^2 over 0 < t < tau < r.
inline double sigma_k(const ModelSpaceParams& p, double r) {
  detail::check_kernel_domain(p, r, "sigma_k");
  const double x = p.k * r * r;
  if (std::abs(x) <= kKernelSeriesThreshold) return r * r * detail::horner(detail::kSigmaSeries, x);
  if (p.k > 0.0) {
    const double q = std::sqrt(p.k);
    return (1.0 - q * r / std::tan(q * r)) / (2.0 * p.k);
  }
  const double q = std::sqrt(-p.k);
  return (1.0 - q * r / std::tanh(q * r)) / (2.0 * p.k);
}

/// psi_k(r) = integral of phi_k over [0, r]. Analytically identical to sigma_k;
/// evaluated from its own closed form.
inline double psi_k(const ModelSpaceParams& p, double r) {
  detail::check_kernel_domain(p, r, "psi_k");
  const double x = p.k * r * r;
  if (std::abs(x) <= kKernelSeriesThreshold) return r * r * detail::horner(detail::kSigmaSeries, x);
  if (p.k > 0.0) {
    const double q = std::sqrt(p.k);
    return 0.5 * (1.0 / p.k - r / (std::tan(q * r) * q));
  }
  const double q = std::sqrt(-p.k);
  return 0.5 * (1.0 / p.k + r / (std::tanh(q * r) * q));
}

/// Secant of exp over [m1, m2]: exp(y) <= a y + b there, with equality at both ends.
struct ChordConstants {
  double a = 1.0;
  double b = 1.0;
  double m1 = 0.0;
  double m2 = 0.0;

  double operator()(double y) const { return a * y + b; }
};

inline ChordConstants chord_constants(double m1, double m2) {
  if (!std::isfinite(m1) || !std::isfinite(m2)) throw DomainError("chord endpoints must be finite");
  if (m1 > m2) throw DomainError("chord_constants needs m1 <= m2");
  const double width = m2 - m1;
  if (width <= kChordDegenerateWidth) {
    const double m = 0.5 * (m1 + m2);
    const double e = std::exp(m);
    return {e, (1.0 - m) * e, m1, m2};
  }
  // a = (e^m2 - e^m1)/(m2 - m1) and b = (m2 e^m1 - m1 e^m2)/(m2 - m1), written with expm1.
  const double q = std::expm1(width) / width;
  const double e1 = std::exp(m1);
  return {e1 * q, e1 * (1.0 - m1 * q), m1, m2};
}

}  // namespace riemlab::specialfn
