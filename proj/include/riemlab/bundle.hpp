#pragma once

// Sampling of the unit sphere bundle with the Liouville measure and Monte
// Carlo averages over shared geodesic records.

#include "riemlab/flow.hpp"
#include "riemlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace riemlab {

struct AverageEstimate {
  double mean = 0.0;
  /// Sample standard deviation / sqrt(count).
  double std_error = 0.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// Mean and standard error of values in slot order.
inline AverageEstimate estimate(const std::vector<double>& values, std::uint64_t seed = 0) {
  AverageEstimate e;
  e.count = values.size();
  e.seed = seed;
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return e;
}

/// A g_p-unit vector, uniform on the unit sphere of T_pN, from a Euclidean unit vector u.
inline Vec unit_direction(const Mat& g, const Vec& u) { return orthonormal_basis(g) * u; }

/// Samples (p, theta) from the normalized Liouville measure. Sample i uses substream (seed, i).
/// Homogeneous manifolds keep p at the base point.
inline std::vector<UnitTangentSample> sample_sn(const ManifoldSpec& spec, std::size_t count, std::uint64_t seed,
                                                int threads = 1) {
  if (count < 1) throw DomainError("sample_sn: count must be >= 1");
  std::vector<UnitTangentSample> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    const ChartPoint p = spec.meta.homogeneous ? spec.base_point : spec.sample_point(rng);
    const Vec u = uniform_unit_vector(rng, spec.n);
    out[i] = {p, unit_direction(metric_at(spec, p), u), 1.0, i};
  });
  return out;
}

/// Directions uniform on the unit sphere at a fixed point.
inline std::vector<UnitTangentSample> sample_fiber(const ManifoldSpec& spec, const ChartPoint& p, std::size_t count,
                                                   std::uint64_t seed) {
  if (count < 1) throw DomainError("sample_fiber: count must be >= 1");
  const Mat g = metric_at(spec, p);
  std::vector<UnitTangentSample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = substream(seed, i);
    out[i] = {p, unit_direction(g, uniform_unit_vector(rng, spec.n)), 1.0, i};
  }
  return out;
}

/// Directions from a sphere quadrature rule at a fixed point; weights sum to 1.
inline std::vector<UnitTangentSample> fiber_rule(const ManifoldSpec& spec, const ChartPoint& p,
                                                 const quad::SphereRule& rule, const Mat& rotation) {
  const Mat g = metric_at(spec, p);
  std::vector<UnitTangentSample> out;
  for (std::size_t i = 0; i < rule.points.size(); ++i)
    out.push_back({p, unit_direction(g, rotation * rule.points[i]), rule.weights[i], i});
  return out;
}

/// One geodesic record per sample, all integrated to the same r_max.
struct RecordSet {
  std::string manifold;
  int n = 0;
  Metadata meta;
  std::uint64_t seed = 0;
  double r_max = 0.0;
  std::vector<GeodesicRecord> records;

  double h() const { return records.empty() ? 0.0 : records.front().h; }
  bool weighted() const {
    return std::any_of(records.begin(), records.end(), [](const auto& r) { return r.sample.weight != 1.0; });
  }
};

inline RecordSet build_records(const ManifoldSpec& spec, const std::vector<UnitTangentSample>& samples, double r_max,
                               const ShootOptions& options = {}, int threads = 1, std::uint64_t seed = 0) {
  RecordSet set{spec.name, spec.n, spec.meta, seed, r_max, {}};
  set.records.resize(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) { set.records[i] = shoot(spec, samples[i], r_max, options); });
  return set;
}

/// Per-record values of a functional, in slot order.
template <class Fn>
std::vector<double> per_record(const RecordSet& set, Fn&& fn) {
  std::vector<double> v(set.records.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(set.records[i]);
  return v;
}

/// Weighted mean for quadrature-rule record sets, or the plain Monte Carlo estimate.
/// For weighted sets std_error is 0: the rule is deterministic.
inline AverageEstimate average(const RecordSet& set, const std::vector<double>& values) {
  if (!set.weighted()) return estimate(values, set.seed);
  AverageEstimate e;
  e.count = values.size();
  e.seed = set.seed;
  double total = 0.0, weight = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += set.records[i].sample.weight * values[i];
    weight += set.records[i].sample.weight;
  }
  e.mean = total / weight;
  return e;
}

namespace detail {

inline void require_below_injectivity(const RecordSet& set, double r, const char* what) {
  if (!(r > 0.0)) throw DomainError(std::string(what) + ": r must be positive");
  if (set.meta.injectivity_radius && r >= *set.meta.injectivity_radius)
    throw DomainError(std::string(what) + ": r = " + std::to_string(r) + " is not below the injectivity radius " +
                      std::to_string(*set.meta.injectivity_radius));
  if (r > set.r_max * (1.0 + 1e-12)) throw DomainError(std::string(what) + ": r exceeds the record length");
}

}  // namespace detail

/// R-bar from n Ric(theta, theta) at each sample (fiber identity).
inline AverageEstimate average_scalar(const ManifoldSpec& spec, const std::vector<UnitTangentSample>& samples,
                                      std::uint64_t seed = 0, int threads = 1) {
  if (samples.empty()) throw DomainError("average_scalar: no samples");
  std::vector<double> v(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    v[i] = spec.n * ricci_along(curvature(spec, samples[i].point), samples[i].theta);
  });
  return estimate(v, seed);
}

/// R-bar from the scalar curvature R(p) at each sample point.
inline AverageEstimate average_scalar_points(const ManifoldSpec& spec, const std::vector<UnitTangentSample>& samples,
                                             std::uint64_t seed = 0, int threads = 1) {
  if (samples.empty()) throw DomainError("average_scalar_points: no samples");
  std::vector<double> v(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) { v[i] = curvature(spec, samples[i].point).scalar; });
  return estimate(v, seed);
}

/// R-bar from the records (n Ric at t = 0).
inline AverageEstimate average_scalar(const RecordSet& set) {
  return average(set, per_record(set, [&](const GeodesicRecord& r) { return set.n * r.ric[0]; }));
}

/// R_k-bar = R-bar - n (n - 1) k.
inline AverageEstimate shift_scalar(AverageEstimate e, int n, double k) {
  e.mean -= n * (n - 1) * k;
  return e;
}

/// Average of Ric_k(gamma'(t)) for each t. By invariance of the Liouville measure all equal R_k-bar / n.
inline std::vector<AverageEstimate> liouville_check(const RecordSet& set, const std::vector<double>& t_list, double k) {
  std::vector<AverageEstimate> out;
  for (double t : t_list) {
    if (t < 0.0 || t > set.r_max * (1.0 + 1e-12)) throw DomainError("liouville_check: t outside [0, r_max]");
    out.push_back(average(set, per_record(set, [&](const GeodesicRecord& r) {
                            return quad::interpolate(r.ric, r.h, t) - (set.n - 1) * k;
                          })));
  }
  return out;
}

/// A-bar(r) = |S^{n-1}| times the average of F(p, r, theta).
inline AverageEstimate average_area(const RecordSet& set, double r) {
  detail::require_below_injectivity(set, r, "average_area");
  auto e = average(set, per_record(set, [&](const GeodesicRecord& g) { return jacobian_F(g, r); }));
  const double w = specialfn::area_unit_sphere(set.n - 1);
  e.mean *= w;
  e.std_error *= w;
  return e;
}

/// V-tilde(r) = |S^{n-1}| times the average of the integral of F-tilde over [0, r].
inline AverageEstimate truncated_volume(const RecordSet& set, double r) {
  if (!(r > 0.0) || r > set.r_max * (1.0 + 1e-12)) throw DomainError("truncated_volume: r outside (0, r_max]");
  auto e = average(set, per_record(set, [&](const GeodesicRecord& g) { return truncated_F_integral(g, r); }));
  const double w = specialfn::area_unit_sphere(set.n - 1);
  e.mean *= w;
  e.std_error *= w;
  return e;
}

/// Sample minimum of F(p, r, theta); never below the true minimum.
inline double min_F(const RecordSet& set, double r) {
  detail::require_below_injectivity(set, r, "min_F");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : set.records) best = std::min(best, jacobian_F(g, r));
  return best;
}

/// Average of log(F / F_k).
inline AverageEstimate average_log_ratio(const RecordSet& set, double r, double k) {
  detail::require_below_injectivity(set, r, "average_log_ratio");
  const double fk = specialfn::model_density_Fk({k, set.n}, r);
  return average(set, per_record(set, [&](const GeodesicRecord& g) {
                   const double f = jacobian_F(g, r);
                   if (f <= 0.0) throw DomainError("average_log_ratio: F is not positive on a sample");
                   return std::log(f / fk);
                 }));
}

/// Average of the mean curvature H(p, r, theta).
inline AverageEstimate average_H(const RecordSet& set, double r) {
  detail::require_below_injectivity(set, r, "average_H");
  return average(set, per_record(set, [&](const GeodesicRecord& g) { return mean_curvature_H(g, r); }));
}

}  // namespace riemlab
