#pragma once

// Geodesic, parallel frame and Jacobi field integration along unit-speed
// geodesics, and the functionals read off the resulting records.

#include "riemlab/manifold.hpp"
#include "riemlab/quadrature.hpp"
#include "riemlab/specialfn.hpp"

#include <Eigen/QR>

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace riemlab {

struct UnitTangentSample {
  ChartPoint point;
  Vec theta;
  double weight = 1.0;
  std::uint64_t stream = 0;
};

struct ShootOptions {
  /// Step length; 0 selects r_max / steps.
  double h = 0.0;
  int steps = 1024;
  bool keep_states = false;
  int reorthonormalize_every = 64;
  double drift_tolerance = 1e-5;
};

struct NodeState {
  ChartPoint point;
  Vec velocity;
  Mat frame;
  Mat J;
  Mat Jdot;
};

struct ConjugateInfo {
  std::optional<double> c;
  double lo = 0.0;
  double hi = 0.0;
  /// Width of the final bisection bracket.
  double residual = 0.0;
};

struct GeodesicRecord {
  UnitTangentSample sample;
  int n = 0;
  double h = 0.0;
  int steps = 0;
  double r_max = 0.0;
  /// Per node t_i = i h: det J, d/dt det J, Ric(gamma', gamma').
  std::vector<double> det;
  std::vector<double> det_rate;
  std::vector<double> ric;
  ConjugateInfo conjugate;
  double max_speed_drift = 0.0;
  double max_frame_defect = 0.0;
  ChartPoint end_point;
  Vec end_velocity;
  /// Full state per node, only with ShootOptions::keep_states.
  std::vector<NodeState> states;

  double t(int i) const { return i * h; }
};

namespace detail {

struct FlowState {
  Vec x, v;
  Mat E, J, K;
};

struct FlowDeriv {
  Vec x, v;
  Mat E, J, K;
};

inline FlowState axpy(const FlowState& s, double a, const FlowDeriv& d, bool jacobi) {
  FlowState out{s.x + a * d.x, s.v + a * d.v, s.E + a * d.E, s.J, s.K};
  if (jacobi) {
    out.J = s.J + a * d.J;
    out.K = s.K + a * d.K;
  }
  return out;
}

struct Evaluation {
  FlowDeriv d;
  Mat rhat;
  double ric = 0.0;
};

// Right-hand side of the coupled system. With jacobi == false only the
// geodesic and frame equations are formed; with curvature == true the Jacobi
// operator in frame components is also returned.
inline Evaluation evaluate(const ManifoldSpec& spec, const Chart& chart, const FlowState& s, bool jacobi,
                           bool curvature) {
  const int n = spec.n;
  const Christoffel gamma = christoffel_in_chart(spec, chart, s.x);
  const Mat b = gamma.contract_last(s.v);
  Evaluation ev;
  ev.d.x = s.v;
  ev.d.v = -(b * s.v);
  ev.d.E = -(b * s.E);
  if (curvature || jacobi) {
    const auto dgamma = christoffel_derivatives(spec, chart, s.x);
    const Mat m = jacobi_operator(gamma, dgamma, s.v, n);
    const Mat g = chart.metric(s.x);
    Mat rhat = s.E.transpose() * g * m * s.E;
    ev.rhat = 0.5 * (rhat + rhat.transpose());
    ev.ric = m.trace() / norm_sq(g, s.v);
    if (jacobi) {
      ev.d.J = s.K;
      ev.d.K = -(ev.rhat * s.J);
    }
  }
  return ev;
}

inline Mat initial_frame(const Mat& g, const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  const Mat basis = orthonormal_basis(g);
  const Vec c = basis.inverse() * theta;
  const Mat column = c;
  Eigen::HouseholderQR<Mat> qr(column);
  const Mat q = qr.householderQ();
  return basis * q.rightCols(n - 1);
}

// Gram-Schmidt of the frame against the velocity in the metric g; returns the defect before the fix.
inline double reorthonormalize(const Mat& g, const Vec& v, Mat& E) {
  const int m = static_cast<int>(E.cols());
  const double vv = norm_sq(g, v);
  double defect = 0.0;
  for (int a = 0; a < m; ++a) {
    defect = std::max(defect, std::abs(E.col(a).dot(g * v)) / std::sqrt(vv));
    for (int b = 0; b < m; ++b)
      defect = std::max(defect, std::abs(E.col(a).dot(g * E.col(b)) - (a == b ? 1.0 : 0.0)));
  }
  for (int a = 0; a < m; ++a) {
    Vec e = E.col(a);
    e -= (e.dot(g * v) / vv) * v;
    for (int b = 0; b < a; ++b) e -= e.dot(g * E.col(b)) * E.col(b);
    E.col(a) = e / std::sqrt(norm_sq(g, e));
  }
  return defect;
}

inline void determinant_and_rate(const Mat& J, const Mat& K, double& det, double& rate) {
  det = J.determinant();
  rate = 0.0;
  for (int c = 0; c < J.cols(); ++c) {
    Mat Jc = J;
    Jc.col(c) = K.col(c);
    rate += Jc.determinant();
  }
}

}  // namespace detail

/// Locates the first zero of det J after t = 0. Sign changes are bracketed
/// directly; even-order zeros show up as a pole of H = det'/det and are located
/// as the sign change of det/det'.
inline ConjugateInfo find_conjugate(const std::vector<double>& det, const std::vector<double>& rate, double h,
                                    double r_max) {
  ConjugateInfo info;
  const double tol = 1e-6 * r_max;
  const int m = static_cast<int>(det.size()) - 1;
  for (int i = 1; i < m; ++i) {
    const double d0 = det[static_cast<std::size_t>(i)], d1 = det[static_cast<std::size_t>(i + 1)];
    const double r0 = rate[static_cast<std::size_t>(i)], r1 = rate[static_cast<std::size_t>(i + 1)];
    const double lo = i * h, hi = (i + 1) * h;
    if (d1 == 0.0) {
      info.c = hi;
      info.lo = info.hi = hi;
      return info;
    }
    if ((d0 < 0.0) != (d1 < 0.0)) {
      auto f = [&](double t) { return quad::hermite(h, d0, r0, d1, r1, t - lo); };
      info.c = quad::bisect(f, lo, hi, tol);
      info.lo = lo;
      info.hi = hi;
      info.residual = tol;
      return info;
    }
    const double H0 = r0 / d0, H1 = r1 / d1;
    if (H0 < 0.0 && H1 > 0.0 && h * std::min(std::abs(H0), std::abs(H1)) > 0.25) {
      std::vector<double> q;
      const int j0 = std::max(i - 1, 0), j1 = std::min(i + 2, m);
      for (int j = j0; j <= j1; ++j) {
        const double rj = rate[static_cast<std::size_t>(j)];
        q.push_back(rj != 0.0 ? det[static_cast<std::size_t>(j)] / rj : 0.0);
      }
      auto f = [&](double t) { return quad::interpolate(q, h, t - j0 * h); };
      info.c = quad::bisect(f, lo, hi, tol);
      info.lo = lo;
      info.hi = hi;
      info.residual = tol;
      return info;
    }
  }
  return info;
}

/// Integrates gamma'' + Gamma(gamma', gamma') = 0 from (p, theta) to r_max with fixed-step RK4,
/// transporting an orthonormal frame of theta-perp and the Jacobi matrix J'' = -R J in frame
/// components. J(h) = h I - h^3/6 R(0), J'(h) = I - h^2/2 R(0).
inline GeodesicRecord shoot(const ManifoldSpec& spec, const UnitTangentSample& sample, double r_max,
                            const ShootOptions& opt = {}) {
  if (!(r_max > 0.0)) throw DomainError("shoot: r_max must be positive");
  if (opt.h < 0.0 || opt.steps < 1) throw DomainError("shoot: step must be positive");
  const int n = spec.n;
  GeodesicRecord rec;
  rec.sample = sample;
  rec.n = n;
  rec.r_max = r_max;
  rec.steps = opt.h > 0.0 ? std::max(1, static_cast<int>(std::ceil(r_max / opt.h - 1e-9))) : opt.steps;
  rec.h = r_max / rec.steps;
  const double h = rec.h;
  const int steps = rec.steps;
  rec.det.assign(static_cast<std::size_t>(steps + 1), 0.0);
  rec.det_rate.assign(static_cast<std::size_t>(steps + 1), 0.0);
  rec.ric.assign(static_cast<std::size_t>(steps + 1), 0.0);

  ChartPoint where = sample.point;
  const Chart* chart = &spec.chart(where.chart);
  const Mat g0 = metric_at(spec, where);
  require_unit(g0, sample.theta);

  detail::FlowState s;
  s.x = where.x;
  s.v = sample.theta;
  s.E = detail::initial_frame(g0, sample.theta);
  s.J = Mat::Zero(n - 1, n - 1);
  s.K = Mat::Identity(n - 1, n - 1);

  auto relocate_if_needed = [&] {
    if (chart->safe && chart->safe(s.x)) return;
    if (!spec.relocate) throw IntegrationError("geodesic left the safe region of a chart and no transition exists");
    auto t = spec.relocate({where.chart, s.x});
    if (!t) throw IntegrationError("no chart covers the geodesic at t; chart " + std::to_string(where.chart));
    where = t->to;
    chart = &spec.chart(where.chart);
    s.x = where.x;
    s.v = t->jacobian * s.v;
    s.E = t->jacobian * s.E;
  };
  auto check_speed = [&](int node) {
    const double speed = std::sqrt(norm_sq(chart->metric(s.x), s.v));
    rec.max_speed_drift = std::max(rec.max_speed_drift, std::abs(speed - 1.0));
    if (rec.max_speed_drift > opt.drift_tolerance)
      throw IntegrationError("unit-speed drift " + std::to_string(rec.max_speed_drift) + " exceeds tolerance at t = " +
                             std::to_string(node * h) + "; reduce the step");
  };
  auto keep = [&] {
    if (opt.keep_states) rec.states.push_back({{where.chart, s.x}, s.v, s.E, s.J, s.K});
  };

  auto rk4 = [&](const detail::Evaluation& first, bool jacobi) {
    const auto& k1 = first.d;
    const auto k2 = detail::evaluate(spec, *chart, detail::axpy(s, 0.5 * h, k1, jacobi), jacobi, false).d;
    const auto k3 = detail::evaluate(spec, *chart, detail::axpy(s, 0.5 * h, k2, jacobi), jacobi, false).d;
    const auto k4 = detail::evaluate(spec, *chart, detail::axpy(s, h, k3, jacobi), jacobi, false).d;
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    s.E += h / 6.0 * (k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E);
    if (jacobi) {
      s.J += h / 6.0 * (k1.J + 2.0 * k2.J + 2.0 * k3.J + k4.J);
      s.K += h / 6.0 * (k1.K + 2.0 * k2.K + 2.0 * k3.K + k4.K);
    }
  };

  // Node 0: J = 0; only the geodesic and frame advance over the first step.
  relocate_if_needed();
  const auto e0 = detail::evaluate(spec, *chart, s, false, true);
  rec.ric[0] = e0.ric;
  rec.det[0] = 0.0;
  rec.det_rate[0] = n == 2 ? 1.0 : 0.0;
  keep();
  rk4(e0, false);
  s.J = h * Mat::Identity(n - 1, n - 1) - (h * h * h / 6.0) * e0.rhat;
  s.K = Mat::Identity(n - 1, n - 1) - (h * h / 2.0) * e0.rhat;

  for (int i = 1; i <= steps; ++i) {
    relocate_if_needed();
    check_speed(i);
    if (opt.reorthonormalize_every > 0 && i % opt.reorthonormalize_every == 0)
      rec.max_frame_defect = std::max(rec.max_frame_defect, detail::reorthonormalize(chart->metric(s.x), s.v, s.E));
    const auto first = detail::evaluate(spec, *chart, s, true, true);
    rec.ric[static_cast<std::size_t>(i)] = first.ric;
    detail::determinant_and_rate(s.J, s.K, rec.det[static_cast<std::size_t>(i)],
                                 rec.det_rate[static_cast<std::size_t>(i)]);
    keep();
    if (i < steps) rk4(first, true);
  }
  rec.max_frame_defect = std::max(rec.max_frame_defect, detail::reorthonormalize(chart->metric(s.x), s.v, s.E));
  rec.end_point = {where.chart, s.x};
  rec.end_velocity = s.v;
  rec.conjugate = find_conjugate(rec.det, rec.det_rate, h, r_max);
  return rec;
}

namespace detail {

inline void check_radius(const GeodesicRecord& rec, double r, const char* what) {
  if (!(r >= 0.0) || r > rec.r_max * (1.0 + 1e-12))
    throw DomainError(std::string(what) + ": r = " + std::to_string(r) + " outside [0, r_max = " +
                      std::to_string(rec.r_max) + "]");
}

inline int interval_of(const GeodesicRecord& rec, double r) {
  return std::clamp(static_cast<int>(std::floor(r / rec.h)), 0, rec.steps - 1);
}

}  // namespace detail

/// F(p, r, theta) = det J(r), cubic Hermite between nodes.
inline double jacobian_F(const GeodesicRecord& rec, double r) {
  detail::check_radius(rec, r, "jacobian_F");
  const int i = detail::interval_of(rec, r);
  const auto u = static_cast<std::size_t>(i);
  return quad::hermite(rec.h, rec.det[u], rec.det_rate[u], rec.det[u + 1], rec.det_rate[u + 1], r - i * rec.h);
}

/// d/dr det J(r), cubic interpolation of the node values.
inline double jacobian_rate(const GeodesicRecord& rec, double r) {
  detail::check_radius(rec, r, "jacobian_rate");
  return quad::interpolate(rec.det_rate, rec.h, r);
}

/// H(p, r, theta) = tr(J' J^{-1}) = (det J)' / det J. Undefined at and beyond the first conjugate point.
inline double mean_curvature_H(const GeodesicRecord& rec, double r) {
  detail::check_radius(rec, r, "mean_curvature_H");
  if (!(r > 0.0)) throw DomainError("mean_curvature_H needs r > 0");
  if (rec.conjugate.c && r >= *rec.conjugate.c)
    throw DomainError("mean_curvature_H: J is singular at or beyond the first conjugate point c = " +
                      std::to_string(*rec.conjugate.c));
  const double d = jacobian_F(rec, r);
  if (d <= 0.0) throw DomainError("mean_curvature_H: det J is not positive");
  return jacobian_rate(rec, r) / d;
}

inline const ConjugateInfo& first_conjugate(const GeodesicRecord& rec) { return rec.conjugate; }

/// F cut off at the first conjugate distance.
inline double truncated_F(const GeodesicRecord& rec, double r) {
  detail::check_radius(rec, r, "truncated_F");
  if (rec.conjugate.c && r >= *rec.conjugate.c) return 0.0;
  return jacobian_F(rec, r);
}

/// Integral of truncated_F over [0, r].
inline double truncated_F_integral(const GeodesicRecord& rec, double r) {
  detail::check_radius(rec, r, "truncated_F_integral");
  const double end = rec.conjugate.c ? std::min(r, *rec.conjugate.c) : r;
  if (end <= 0.0) return 0.0;
  // Exact integral of each Hermite piece: w (y0 + y1) / 2 + w^2 (d0 - d1) / 12.
  double total = 0.0;
  const int last = detail::interval_of(rec, end);
  for (int i = 0; i < last; ++i) {
    const auto u = static_cast<std::size_t>(i);
    total += rec.h * (rec.det[u] + rec.det[u + 1]) / 2.0 + rec.h * rec.h * (rec.det_rate[u] - rec.det_rate[u + 1]) / 12.0;
  }
  const auto u = static_cast<std::size_t>(last);
  const double t0 = last * rec.h, w = end - t0;
  if (w > 0.0) {
    const double half = 0.5 * w, off = half / std::sqrt(3.0);
    auto f = [&](double s) { return quad::hermite(rec.h, rec.det[u], rec.det_rate[u], rec.det[u + 1], rec.det_rate[u + 1], s); };
    total += half * (f(half - off) + f(half + off));
  }
  return total;
}

/// Ric_k(gamma'(t)) at the nodes.
inline std::vector<double> ric_k_profile(const GeodesicRecord& rec, double k) {
  std::vector<double> out(rec.ric.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rec.ric[i] - (rec.n - 1) * k;
  return out;
}

namespace detail {

// Nodes usable for kernels with s_k in the denominator: t_i < pi / sqrt(k), and no further than needed for r.
inline int usable_nodes(const GeodesicRecord& rec, double k, double r) {
  int last = std::min(rec.steps, static_cast<int>(std::ceil(r / rec.h)) + 2);
  const double zero = specialfn::first_zero(k);
  while (last > 0 && last * rec.h >= zero * (1.0 - 1e-12)) --last;
  return last;
}

inline void check_kernel_radius(const GeodesicRecord& rec, double k, double r, const char* what) {
  check_radius(rec, r, what);
  if (!(r > 0.0)) throw DomainError(std::string(what) + " needs r > 0");
  if (k > 0.0 && r >= specialfn::first_zero(k))
    throw DomainError(std::string(what) + " needs r < pi/sqrt(k)");
}

}  // namespace detail

/// Node values of I(t) = integral over [0, t] of s_k^2 Ric_k, up to the usable nodes.
inline std::vector<double> weighted_ric_cumulative(const GeodesicRecord& rec, double k, double r, std::vector<double>* y_out = nullptr) {
  const specialfn::ModelSpaceParams p{k, rec.n};
  const int last = detail::usable_nodes(rec, k, r);
  std::vector<double> y(static_cast<std::size_t>(last + 1));
  for (int i = 0; i <= last; ++i) {
    const double s = specialfn::s_k(p, rec.t(i));
    y[static_cast<std::size_t>(i)] = s * s * (rec.ric[static_cast<std::size_t>(i)] - (rec.n - 1) * k);
  }
  auto cum = quad::cumulative(y, rec.h);
  if (y_out) *y_out = std::move(y);
  return cum;
}

/// Integral over [0, r] of (s_k(t)^2 / s_k(r)^2) Ric_k(gamma'(t)) dt.
inline double single_ric_integral(const GeodesicRecord& rec, double k, double r) {
  detail::check_kernel_radius(rec, k, r, "single_ric_integral");
  std::vector<double> y;
  const auto cum = weighted_ric_cumulative(rec, k, r, &y);
  const double s = specialfn::s_k({k, rec.n}, r);
  return quad::integrate_to(y, cum, rec.h, r) / (s * s);
}

/// Node values N(t_i) of the nested integral, for nodes up to just past r.
inline std::vector<double> nested_ric_profile(const GeodesicRecord& rec, double k, double r) {
  const specialfn::ModelSpaceParams p{k, rec.n};
  const auto cum = weighted_ric_cumulative(rec, k, r);
  std::vector<double> z(cum.size(), 0.0);
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double s = specialfn::s_k(p, rec.t(static_cast<int>(i)));
    z[i] = cum[i] / (s * s);
  }
  return quad::cumulative(z, rec.h);
}

/// Integral over 0 < t < tau < r of (s_k(t)^2 / s_k(tau)^2) Ric_k(gamma'(t)).
/// The integrand I(tau)/s_k(tau)^2 vanishes like Ric_k(0) tau / 3 at tau = 0.
inline double nested_ric_integral(const GeodesicRecord& rec, double k, double r) {
  detail::check_kernel_radius(rec, k, r, "nested_ric_integral");
  const specialfn::ModelSpaceParams p{k, rec.n};
  const auto cum = weighted_ric_cumulative(rec, k, r);
  std::vector<double> z(cum.size(), 0.0);
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double s = specialfn::s_k(p, rec.t(static_cast<int>(i)));
    z[i] = cum[i] / (s * s);
  }
  return quad::integrate(z, rec.h, r);
}

/// Debug dump: t, det J, H, Ric_k(gamma'(t)); H is empty at t = 0 and from the first conjugate point on.
inline void write_record_csv(std::ostream& os, const GeodesicRecord& rec, double k) {
  os << "t,detJ,H,ric_k\n";
  os.precision(17);
  for (int i = 0; i <= rec.steps; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double t = rec.t(i);
    os << t << ',' << rec.det[u] << ',';
    if (i > 0 && !(rec.conjugate.c && t >= *rec.conjugate.c) && rec.det[u] > 0.0) os << rec.det_rate[u] / rec.det[u];
    os << ',' << rec.ric[u] - (rec.n - 1) * k << '\n';
  }
}

}  // namespace riemlab
