#pragma once

// Evaluators for the comparison theorems. Each produces BoundReport rows
// with both sides of the inequality, the margin rhs - lhs, its Monte Carlo
// standard error and a verdict.

#include "riemlab/bundle.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace riemlab::theorems {

enum class Verdict { holds, holds_at_equality, violated, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_at_equality: return "holds-at-equality";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// Ordering for combining verdicts: larger is worse.
inline int severity(Verdict v) {
  switch (v) {
    case Verdict::holds: return 0;
    case Verdict::holds_at_equality: return 1;
    case Verdict::inconclusive: return 2;
    case Verdict::violated: return 3;
  }
  return 2;
}

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

struct BoundReport {
  std::string theorem;
  std::string manifold;
  int n = 0;
  double k = kAbsent;
  double r = kAbsent;
  double kappa = kAbsent;
  double lhs = kAbsent;
  double rhs = kAbsent;
  double margin = kAbsent;
  double mc_stderr = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double h = kAbsent;
  Verdict verdict = Verdict::inconclusive;
  std::string notes;
  /// Secondary numbers, serialized into the notes as key=value.
  std::vector<std::pair<std::string, double>> extras;

  double extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
      if (k == key) return v;
    return kAbsent;
  }
};

/// Evaluator parameters; absent values take documented defaults.
struct Params {
  std::optional<double> k, r, kappa, kappa1, kappa2, l, s;
  std::vector<double> r_grid;
  std::vector<double> r_list;
};

struct RunSettings {
  /// 0 selects 10 000 records for surfaces and 2 000 otherwise.
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  /// Integration step; 0 selects r_max / 1024.
  double h = 0.0;
  int threads = 1;
};

inline std::size_t default_samples(int n) { return n == 2 ? 10000 : 2000; }

/// Shared state for evaluators run on one manifold: the Liouville samples, their
/// Ricci values and geodesic records cached by length. Not thread-safe; the
/// parallelism lives inside record construction.
class Workspace {
 public:
  Workspace(const ManifoldSpec& spec, RunSettings settings) : spec_(spec), settings_(settings) {
    if (settings_.samples == 0) settings_.samples = default_samples(spec.n);
    if (settings_.h < 0.0) throw ConfigError("step h must be positive");
  }

  const ManifoldSpec& spec() const { return spec_; }
  const RunSettings& settings() const { return settings_; }
  std::size_t sample_count() const { return settings_.samples; }

  const std::vector<UnitTangentSample>& samples() {
    if (samples_.empty()) samples_ = sample_sn(spec_, settings_.samples, settings_.seed, settings_.threads);
    return samples_;
  }

  /// Ric(theta, theta) at each sample.
  const std::vector<double>& ricci() {
    if (ricci_.empty()) {
      const auto& smp = samples();
      ricci_.resize(smp.size());
      parallel_for(smp.size(), settings_.threads,
                   [&](std::size_t i) { ricci_[i] = ricci_along(curvature(spec_, smp[i].point), smp[i].theta); });
    }
    return ricci_;
  }

  /// R-bar = n times the average of Ric(theta, theta).
  AverageEstimate scalar() {
    auto e = estimate(ricci(), settings_.seed);
    e.mean *= spec_.n;
    e.std_error *= spec_.n;
    return e;
  }

  ShootOptions shoot_options(double r_max) const {
    ShootOptions o;
    if (settings_.h > 0.0) o.h = std::min(settings_.h, r_max);
    return o;
  }

  const RecordSet& records(double r_max) {
    auto it = records_.find(r_max);
    if (it == records_.end())
      it = records_
               .emplace(r_max, build_records(spec_, samples(), r_max, shoot_options(r_max), settings_.threads,
                                             settings_.seed))
               .first;
    return it->second;
  }

 private:
  ManifoldSpec spec_;
  RunSettings settings_;
  std::vector<UnitTangentSample> samples_;
  std::vector<double> ricci_;
  std::map<double, RecordSet> records_;
};

namespace detail {

using specialfn::ModelSpaceParams;

/// Verdict from the margin rhs - lhs. The band is 3 standard errors, floored at
/// 1e-5 of the natural scale of the compared quantities (integrator tolerance).
inline Verdict judge(double margin, double se, double scale, bool equality_expected, double* band_out = nullptr) {
  const double band = std::max({3.0 * se, 1e-5 * std::abs(scale), 1e-12});
  if (band_out) *band_out = band;
  if (!std::isfinite(margin)) return Verdict::inconclusive;
  if (margin > band) return Verdict::holds;
  if (margin < -band) return Verdict::violated;
  return equality_expected ? Verdict::holds_at_equality : Verdict::inconclusive;
}

inline bool curvature_is(const Metadata& m, double k, double rel = 1e-9) {
  return m.constant_curvature && std::abs(*m.constant_curvature - k) <= rel * std::max(1.0, std::abs(k));
}

inline double need(const std::optional<double>& v, const char* name) {
  if (!v) throw ConfigError(std::string("missing parameter ") + name);
  if (!std::isfinite(*v)) throw ConfigError(std::string("parameter ") + name + " must be finite");
  return *v;
}

inline void require_radius(const ManifoldSpec& spec, double r, double k, bool below_inj, const char* what) {
  if (!(r > 0.0)) throw DomainError(std::string(what) + ": r must be positive");
  if (below_inj && spec.meta.injectivity_radius && r >= *spec.meta.injectivity_radius)
    throw DomainError(std::string(what) + ": r = " + std::to_string(r) + " must be below the injectivity radius " +
                      std::to_string(*spec.meta.injectivity_radius));
  if (k > 0.0 && r >= specialfn::first_zero(k))
    throw DomainError(std::string(what) + ": r must be below pi/sqrt(k) = " + std::to_string(specialfn::first_zero(k)));
}

inline BoundReport row(Workspace& ws, const std::string& id, double k, double r, double kappa = kAbsent) {
  BoundReport b;
  b.theorem = id;
  b.manifold = ws.spec().name;
  b.n = ws.spec().n;
  b.k = k;
  b.r = r;
  b.kappa = kappa;
  b.samples = ws.sample_count();
  b.seed = ws.settings().seed;
  return b;
}

inline void add_note(BoundReport& b, const std::string& text) {
  if (!b.notes.empty()) b.notes += "; ";
  b.notes += text;
}

/// Sampled or declared range of Ric_k.
struct RicRange {
  double lo = 0.0, hi = 0.0;
  bool declared = false;
};

inline RicRange ric_k_range(Workspace& ws, double k) {
  const int n = ws.spec().n;
  if (const auto& d = ws.spec().meta.ricci_range) return {d->lo - (n - 1) * k, d->hi - (n - 1) * k, true};
  const auto& ric = ws.ricci();
  const auto [lo, hi] = std::minmax_element(ric.begin(), ric.end());
  return {*lo - (n - 1) * k, *hi - (n - 1) * k, false};
}

/// Upper bound kappa for Ric_k: declared sup, or the sampled sup inflated by 1%.
/// Falls back to 1 when Ric_k <= 0 everywhere (any kappa > 0 is then admissible).
inline double default_kappa(Workspace& ws, double k) {
  const auto range = ric_k_range(ws, k);
  const double sup = range.declared ? range.hi : range.hi * 1.01;
  return sup > 1e-9 ? sup : 1.0;
}

/// Checks lo <= Ric_k <= hi with a 1% tolerance of the range scale. Returns a note on failure.
inline std::optional<std::string> check_ric_k_range(Workspace& ws, double k, double lo, double hi) {
  const auto range = ric_k_range(ws, k);
  const double tol = 0.01 * std::max({std::abs(lo), std::abs(hi), std::abs(range.lo), std::abs(range.hi), 1e-9});
  const char* source = range.declared ? "declared" : "sampled";
  std::ostringstream os;
  os.precision(6);
  if (range.lo < lo - tol) {
    os << "hypothesis fails: " << source << " inf Ric_k = " << range.lo << " < " << lo;
    return os.str();
  }
  if (range.hi > hi + tol) {
    os << "hypothesis fails: " << source << " sup Ric_k = " << range.hi << " > " << hi;
    return os.str();
  }
  return std::nullopt;
}

inline double kappa_param(Workspace& ws, const Params& p, double k) {
  if (!p.kappa) return default_kappa(ws, k);
  if (!(*p.kappa > 0.0)) throw ConfigError("kappa must be positive");
  return *p.kappa;
}

/// Scalar-curvature hypothesis R-bar >= n (n - 1) k, tested 3 standard errors down.
inline bool scalar_hypothesis(const AverageEstimate& rbar, int n, double k, double* margin = nullptr) {
  const double target = n * (n - 1) * k;
  if (margin) *margin = rbar.mean - target;
  return rbar.mean >= target - std::max(3.0 * rbar.std_error, 1e-6 * std::max(1.0, std::abs(target)));
}

/// Paired statistics over per-record lhs_i, rhs_i.
struct Paired {
  double lhs = 0.0, rhs = 0.0, margin = 0.0, se = 0.0;
};

inline Paired paired(const std::vector<double>& lhs, const std::vector<double>& rhs) {
  std::vector<double> d(lhs.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = rhs[i] - lhs[i];
  Paired p;
  p.lhs = estimate(lhs).mean;
  p.rhs = estimate(rhs).mean;
  p.margin = p.rhs - p.lhs;
  p.se = estimate(d).std_error;
  return p;
}

inline double integrate(const std::function<double(double)>& f, double lo, double hi, int panels = 8) {
  const double w = (hi - lo) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i)
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo + i * w, lo + (i + 1) * w);
  return total;
}

/// Chord constants of Cor 2.7 item 1 at radius t: exp on [-kappa sigma_k(t), 0].
inline specialfn::ChordConstants item1_chord(const ModelSpaceParams& mp, double kappa, double t) {
  if (t <= 0.0) return specialfn::chord_constants(0.0, 0.0);
  return specialfn::chord_constants(-kappa * specialfn::sigma_k(mp, t), 0.0);
}

/// Right-hand side of the average volume bound with R_k-bar in place of the per-record integrals.
inline double volume_rhs_closed(const ModelSpaceParams& mp, double kappa, double rbar_k, double r) {
  return integrate(
      [&](double t) {
        const auto c = item1_chord(mp, kappa, t);
        return (c.b - c.a * rbar_k / mp.n * specialfn::sigma_k(mp, t)) * specialfn::model_area(mp, t);
      },
      0.0, r);
}

/// Integral of (1 - exp(-kappa sigma_k)) A_k over [0, upper]; the factor is clamped to 1 once sigma_k > 50 / kappa.
inline double total_volume_integral(const ModelSpaceParams& mp, double kappa, double upper) {
  return integrate(
      [&](double t) {
        if (t <= 0.0) return 0.0;
        const double s = specialfn::sigma_k(mp, t);
        const double factor = s > 50.0 / kappa ? 1.0 : -std::expm1(-kappa * s);
        return factor * specialfn::model_area(mp, t);
      },
      0.0, upper);
}

/// Step the flow uses for records of length r under these settings.
inline double effective_h(const Workspace& ws, double r) {
  const auto o = ws.shoot_options(r);
  const int steps = o.h > 0.0 ? std::max(1, static_cast<int>(std::ceil(r / o.h - 1e-9))) : o.steps;
  return r / steps;
}

inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) {
  return seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
}

inline void fill_hypothesis_failure(BoundReport& b, const std::string& note) {
  b.verdict = Verdict::inconclusive;
  add_note(b, note);
}

}  // namespace detail

using Evaluator = std::function<std::vector<BoundReport>(Workspace&, const Params&)>;

/// Conjugate radius vs pi / sqrt(k) under R-bar >= n (n - 1) k.
inline std::vector<BoundReport> check_green(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k");
  if (!(k > 0.0)) throw ConfigError("check_green needs k > 0");
  const int n = ws.spec().n;
  const double r_max = 1.5 * specialfn::first_zero(k);
  auto b = detail::row(ws, "check_green", k, kAbsent);
  b.rhs = specialfn::first_zero(k);
  const auto rbar = ws.scalar();
  double hyp_margin = 0.0;
  const bool hyp = detail::scalar_hypothesis(rbar, n, k, &hyp_margin);
  b.extras = {{"Rbar", rbar.mean}, {"Rbar_stderr", rbar.std_error}, {"hypothesis_margin", hyp_margin}};
  if (!hyp) {
    detail::fill_hypothesis_failure(b, "hypothesis fails: Rbar < n(n-1)k");
    return {b};
  }
  const auto& set = ws.records(r_max);
  b.h = set.h();
  double conj = std::numeric_limits<double>::infinity();
  std::size_t found = 0;
  for (const auto& rec : set.records)
    if (rec.conjugate.c) {
      conj = std::min(conj, *rec.conjugate.c);
      ++found;
    }
  if (found == 0) {
    conj = r_max;
    detail::add_note(b, "no conjugate point before r_max; lhs is a lower bound");
  }
  b.lhs = conj;
  b.margin = b.rhs - b.lhs;
  b.mc_stderr = 0.0;
  const double band = std::max(1e-3, 1e-6 * r_max);
  if (b.margin > band)
    b.verdict = Verdict::holds;
  else if (b.margin < -band)
    b.verdict = Verdict::violated;
  else
    b.verdict = detail::curvature_is(ws.spec().meta, k) ? Verdict::holds_at_equality : Verdict::inconclusive;
  b.extras.push_back({"records_with_conjugate", static_cast<double>(found)});
  detail::add_note(b, "lhs = sampled conjugate radius (min over records)");
  if (b.verdict == Verdict::holds_at_equality) detail::add_note(b, "has constant sectional curvature k");
  return {b};
}

/// |N| >= l^2 / (n (n - 1) pi^2) * integral of R, when conj(N) >= l.
inline std::vector<BoundReport> check_volume_lower(Workspace& ws, const Params& p) {
  const auto& spec = ws.spec();
  const int n = spec.n;
  if (!spec.meta.volume) throw ConfigError("check_volume_lower needs the manifold volume");
  const double vol = *spec.meta.volume;
  const auto range = detail::ric_k_range(ws, 0.0);
  double r_max;
  if (range.lo > 1e-9)
    r_max = 1.5 * std::numbers::pi / std::sqrt(range.lo / (n - 1));
  else if (spec.meta.injectivity_radius)
    r_max = 2.0 * *spec.meta.injectivity_radius;
  else
    throw ConfigError("check_volume_lower needs a positive Ricci lower bound or an injectivity radius");
  const auto& set = ws.records(r_max);
  double conj = r_max;
  for (const auto& rec : set.records)
    if (rec.conjugate.c) conj = std::min(conj, *rec.conjugate.c);
  const double l = p.l ? *p.l : conj;
  if (!(l > 0.0)) throw ConfigError("l must be positive");
  auto b = detail::row(ws, "check_volume_lower", kAbsent, kAbsent);
  b.h = set.h();
  const auto rbar = ws.scalar();
  const double c = l * l / (n * (n - 1) * std::numbers::pi * std::numbers::pi);
  b.lhs = c * rbar.mean * vol;
  b.rhs = vol;
  b.margin = b.rhs - b.lhs;
  b.mc_stderr = c * rbar.std_error * vol;
  b.extras = {{"l", l}, {"sampled_conj", conj}, {"Rbar", rbar.mean}};
  if (l > conj * (1.0 + 1e-5)) {
    detail::fill_hypothesis_failure(b, "hypothesis fails: sampled conjugate radius below l");
    return {b};
  }
  const double model = std::numbers::pi * std::numbers::pi / (l * l);
  b.verdict = detail::judge(b.margin, b.mc_stderr, b.rhs, detail::curvature_is(spec.meta, model, 1e-3));
  if (conj >= r_max) detail::add_note(b, "no conjugate point before r_max");
  return {b};
}

/// Pointwise F <= exp(-nested integral) F_k at every sampled record; reports the worst record.
inline std::vector<BoundReport> check_jacobian_bound(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k"), r = detail::need(p.r, "r");
  detail::require_radius(ws.spec(), r, k, true, "check_jacobian_bound");
  const auto& set = ws.records(r);
  const double fk = specialfn::model_density_Fk({k, ws.spec().n}, r);
  auto b = detail::row(ws, "check_jacobian_bound", k, r);
  b.h = set.h();
  std::size_t worst = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& rec = set.records[i];
    const double lhs = jacobian_F(rec, r), rhs = std::exp(-nested_ric_integral(rec, k, r)) * fk;
    if (rhs - lhs < worst_margin) {
      worst_margin = rhs - lhs;
      worst = i;
      b.lhs = lhs;
      b.rhs = rhs;
    }
  }
  b.margin = b.rhs - b.lhs;
  b.verdict = detail::judge(b.margin, 0.0, b.rhs, detail::curvature_is(ws.spec().meta, k));
  b.extras = {{"worst_stream", static_cast<double>(set.records[worst].sample.stream)}};
  detail::add_note(b, "pointwise over all records; row shows the worst record");
  return {b};
}

/// Pointwise H <= F_k'/F_k - single Ricci integral; reports the worst record.
inline std::vector<BoundReport> check_mean_curvature_bound(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k"), r = detail::need(p.r, "r");
  detail::require_radius(ws.spec(), r, k, true, "check_mean_curvature_bound");
  const auto& set = ws.records(r);
  const double model = specialfn::model_mean_curvature({k, ws.spec().n}, r);
  auto b = detail::row(ws, "check_mean_curvature_bound", k, r);
  b.h = set.h();
  std::size_t worst = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& rec = set.records[i];
    const double lhs = mean_curvature_H(rec, r), rhs = model - single_ric_integral(rec, k, r);
    if (rhs - lhs < worst_margin) {
      worst_margin = rhs - lhs;
      worst = i;
      b.lhs = lhs;
      b.rhs = rhs;
    }
  }
  b.margin = b.rhs - b.lhs;
  b.verdict = detail::judge(b.margin, 0.0, b.rhs, detail::curvature_is(ws.spec().meta, k));
  b.extras = {{"worst_stream", static_cast<double>(set.records[worst].sample.stream)}};
  detail::add_note(b, "pointwise over all records; row shows the worst record");
  return {b};
}

/// Default grid r (0.5 + j / 16), j = 0..8.
inline std::vector<double> default_grid(double r) {
  std::vector<double> g;
  for (int j = 0; j <= 8; ++j) g.push_back(r * (0.5 + j / 16.0));
  return g;
}

/// d/dr E[log(F/F_k)] <= -(R_k-bar / n) phi_k(r) by centered differences on a grid, written as
/// D E[log F] <= D log F_k - D E[nested integral]. Reports the worst interior node.
inline std::vector<BoundReport> check_monotone(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k");
  std::vector<double> grid = p.r_grid;
  if (grid.empty()) grid = default_grid(detail::need(p.r, "r"));
  if (grid.size() < 5) throw DomainError("check_monotone: grid needs at least 5 nodes");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1])) throw DomainError("check_monotone: grid must be strictly increasing");
  const int n = ws.spec().n;
  detail::require_radius(ws.spec(), grid.front(), k, true, "check_monotone");
  detail::require_radius(ws.spec(), grid.back(), k, true, "check_monotone");
  const auto& set = ws.records(grid.back());
  const detail::ModelSpaceParams mp{k, n};
  const std::size_t m = grid.size(), count = set.records.size();
  // Per node and record: log F and the nested integral.
  std::vector<std::vector<double>> logf(m, std::vector<double>(count)), nested(m, std::vector<double>(count));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double f = jacobian_F(set.records[i], grid[j]);
      if (f <= 0.0) throw DomainError("check_monotone: F is not positive on a record");
      logf[j][i] = std::log(f);
      nested[j][i] = nested_ric_integral(set.records[i], k, grid[j]);
    }
  BoundReport best;
  double best_key = std::numeric_limits<double>::infinity();
  int best_severity = -1;
  bool decreasing = true;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    const double mean_log_ratio =
        estimate(logf[j]).mean - (n - 1) * std::log(grid[j]);  // k = 0 corollary quantity
    if (mean_log_ratio > previous + 1e-12) decreasing = false;
    previous = mean_log_ratio;
  }
  for (std::size_t j = 1; j + 1 < m; ++j) {
    const double w = grid[j + 1] - grid[j - 1];
    const double dlogfk = (std::log(specialfn::model_density_Fk(mp, grid[j + 1])) -
                           std::log(specialfn::model_density_Fk(mp, grid[j - 1]))) / w;
    std::vector<double> lhs(count), rhs(count);
    for (std::size_t i = 0; i < count; ++i) {
      lhs[i] = (logf[j + 1][i] - logf[j - 1][i]) / w;
      rhs[i] = dlogfk - (nested[j + 1][i] - nested[j - 1][i]) / w;
    }
    const auto pr = detail::paired(lhs, rhs);
    auto b = detail::row(ws, "check_monotone", k, grid[j]);
    b.h = set.h();
    b.lhs = pr.lhs;
    b.rhs = pr.rhs;
    b.margin = pr.margin;
    b.mc_stderr = pr.se;
    double band = 0.0;
    const double scale = std::max({std::abs(b.rhs), std::abs(b.lhs), (n - 1) / grid[j]});
    b.verdict = detail::judge(b.margin, b.mc_stderr, scale, detail::curvature_is(ws.spec().meta, k), &band);
    const int sev = severity(b.verdict);
    const double key = b.margin - band;
    if (sev > best_severity || (sev == best_severity && key < best_key)) {
      best_severity = sev;
      best_key = key;
      best = b;
    }
  }
  best.extras = {{"grid_lo", grid.front()}, {"grid_hi", grid.back()}, {"nodes", static_cast<double>(m)}};
  detail::add_note(best, "worst interior node of the grid; sides are centered differences of E[log F] and log F_k - E[nested]");
  if (k == 0.0) {
    const auto rbar = ws.scalar();
    if (rbar.mean >= 0.0) {
      best.extras.push_back({"decreasing", decreasing ? 1.0 : 0.0});
      detail::add_note(best, decreasing ? "E[log(F/r^(n-1))] decreasing on the grid"
                                        : "E[log(F/r^(n-1))] not decreasing on the grid");
    }
  }
  return {best};
}

/// min F(p, r, theta) <= exp(-(R_k-bar / n) psi_k(r)) F_k(r).
inline std::vector<BoundReport> check_min_F(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k"), r = detail::need(p.r, "r");
  const int n = ws.spec().n;
  detail::require_radius(ws.spec(), r, k, true, "check_min_F");
  const auto& set = ws.records(r);
  const detail::ModelSpaceParams mp{k, n};
  const auto rbar = ws.scalar();
  const double psi = specialfn::psi_k(mp, r);
  const double rbar_k = rbar.mean - n * (n - 1) * k;
  auto b = detail::row(ws, "check_min_F", k, r);
  b.h = set.h();
  b.lhs = min_F(set, r);
  b.rhs = std::exp(-rbar_k / n * psi) * specialfn::model_density_Fk(mp, r);
  b.margin = b.rhs - b.lhs;
  b.mc_stderr = b.rhs * psi / n * rbar.std_error;
  b.verdict = detail::judge(b.margin, b.mc_stderr, b.rhs, detail::curvature_is(ws.spec().meta, k));
  b.extras = {{"Rbar", rbar.mean}};
  detail::add_note(b, "lhs is a sample minimum (never below the true minimum)");
  return {b};
}

/// Fraction of points p with A(p, r) >= s A_k(r), with fiber rules at each point.
inline BoundReport chebyshev_row(Workspace& ws, double k, double r, double kappa, double s) {
  const auto& spec = ws.spec();
  const int n = spec.n;
  if (!(s > 0.0)) throw ConfigError("s must be positive");
  const detail::ModelSpaceParams mp{k, n};
  const auto rule = quad::sphere_rule(n - 1, n == 2 ? 4 : 3);
  const std::size_t points = std::max<std::size_t>(100, ws.sample_count() / rule.points.size());
  const double ak = specialfn::model_area(mp, r), omega = specialfn::area_unit_sphere(n - 1);
  const std::uint64_t seed = detail::derived_seed(ws.settings().seed, 1);
  std::vector<double> hit(points);
  parallel_for(points, ws.settings().threads, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    const ChartPoint pt = spec.meta.homogeneous ? spec.base_point : spec.sample_point(rng);
    const Mat rot = Eigen::HouseholderQR<Mat>(Mat::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) {
                      return std::normal_distribution<double>()(rng);
                    })).householderQ();
    double area = 0.0;
    for (const auto& smp : fiber_rule(spec, pt, rule, rot))
      area += smp.weight * jacobian_F(shoot(spec, smp, r, ws.shoot_options(r)), r);
    hit[i] = omega * area >= s * ak ? 1.0 : 0.0;
  });
  const auto frac = estimate(hit);
  const auto rbar = ws.scalar();
  const double sigma = specialfn::sigma_k(mp, r);
  const double loss = -std::expm1(-kappa * sigma) / (n * kappa);
  auto b = detail::row(ws, "check_average_area/chebyshev", k, r, kappa);
  b.samples = points;
  b.h = detail::effective_h(ws, r);
  b.lhs = frac.mean;
  b.rhs = (1.0 - loss * (rbar.mean - n * (n - 1) * k)) / s;
  b.margin = b.rhs - b.lhs;
  b.mc_stderr = std::hypot(std::sqrt(frac.mean * (1.0 - frac.mean) / static_cast<double>(points)),
                           loss * rbar.std_error / s);
  b.verdict = detail::judge(b.margin, b.mc_stderr, b.rhs, detail::curvature_is(spec.meta, k));
  b.extras = {{"s", s}, {"fiber_directions", static_cast<double>(rule.points.size())}};
  detail::add_note(b, "fraction of sampled points with A(p,r) >= s A_k(r)");
  return b;
}

/// A-bar(r) <= (b - a (R_k-bar / n) sigma_k(r)) A_k(r) with chord constants on [-c2, -c1].
/// Without kappa1/kappa2 this is Cor 2.7 item 1 (0 <= Ric_k <= kappa).
inline std::vector<BoundReport> check_average_area(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k"), r = detail::need(p.r, "r");
  const auto& spec = ws.spec();
  const int n = spec.n;
  detail::require_radius(spec, r, k, true, "check_average_area");
  const detail::ModelSpaceParams mp{k, n};
  const bool item2 = p.kappa1 || p.kappa2;
  double lo = 0.0, hi;
  if (item2) {
    lo = detail::need(p.kappa1, "kappa1");
    hi = detail::need(p.kappa2, "kappa2");
    if (!(lo <= hi)) throw ConfigError("kappa1 must not exceed kappa2");
  } else {
    hi = detail::kappa_param(ws, p, k);
  }
  const double sigma = specialfn::sigma_k(mp, r);
  const auto chord = specialfn::chord_constants(-hi * sigma, -lo * sigma);
  const double ak = specialfn::model_area(mp, r), omega = specialfn::area_unit_sphere(n - 1);
  const auto& set = ws.records(r);
  std::vector<double> lhs(set.records.size()), rhs(lhs.size()), nested(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    nested[i] = nested_ric_integral(set.records[i], k, r);
    lhs[i] = omega * jacobian_F(set.records[i], r);
    rhs[i] = ak * (chord.b - chord.a * nested[i]);
  }
  const auto pr = detail::paired(lhs, rhs);
  auto b = detail::row(ws, "check_average_area", k, r, item2 ? kAbsent : hi);
  b.h = set.h();
  b.lhs = pr.lhs;
  b.rhs = pr.rhs;
  b.margin = pr.margin;
  b.mc_stderr = pr.se;
  const auto rbar = ws.scalar();
  const double rbar_k = rbar.mean - n * (n - 1) * k;
  const auto nest = estimate(nested);
  b.extras = {{"a", chord.a},
              {"b", chord.b},
              {"A_k", ak},
              {"improvement", ak - b.rhs},
              {"improvement_stderr", ak * chord.a * nest.std_error},
              {"rhs_closed", ak * (chord.b - chord.a * rbar_k / n * sigma)}};
  if (item2) {
    b.extras.push_back({"kappa1", lo});
    b.extras.push_back({"kappa2", hi});
    const double e1 = std::exp(-lo * sigma), e2 = std::exp(-hi * sigma);
    if (e1 != e2) {
      const double t = (e1 - 1.0) / (e1 - e2);
      const bool cond = rbar_k / n >= (1.0 - t) * lo + t * hi;
      b.extras.push_back({"t", t});
      detail::add_note(b, cond ? "item 2 condition met: A-bar <= A_k" : "item 2 condition not met");
    }
  }
  if (auto fail = detail::check_ric_k_range(ws, k, lo, hi)) {
    detail::fill_hypothesis_failure(b, *fail);
    return {b};
  }
  b.verdict = detail::judge(b.margin, b.mc_stderr, b.rhs, detail::curvature_is(spec.meta, k));
  std::vector<BoundReport> out{b};
  if (p.s) {
    if (item2) throw ConfigError("the Chebyshev bound uses kappa, not kappa1/kappa2");
    out.push_back(chebyshev_row(ws, k, r, hi, *p.s));
  }
  return out;
}

/// V-tilde(r) <= integral over [0, r] of (b(t) - a(t) (R_k-bar / n) sigma_k(t)) A_k(t) dt, 0 <= Ric_k <= kappa.
inline std::vector<BoundReport> check_average_volume(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k"), r = detail::need(p.r, "r");
  const auto& spec = ws.spec();
  const int n = spec.n;
  if (!(r > 0.0)) throw DomainError("check_average_volume: r must be positive");
  if (k > 0.0 && r > specialfn::first_zero(k)) throw DomainError("check_average_volume: r must not exceed pi/sqrt(k)");
  const double kappa = detail::kappa_param(ws, p, k);
  const detail::ModelSpaceParams mp{k, n};
  const auto& set = ws.records(r);
  const double h = set.h();
  const double omega = specialfn::area_unit_sphere(n - 1);
  // Chord weights on the record grid.
  const int nodes = set.records.front().steps + 1;
  std::vector<double> wa(static_cast<std::size_t>(nodes)), wb(wa.size());
  for (int j = 0; j < nodes; ++j) {
    const double t = j * h;
    if (k > 0.0 && t >= specialfn::first_zero(k)) break;
    const auto c = detail::item1_chord(mp, kappa, t);
    const double ak = specialfn::model_area(mp, t);
    wa[static_cast<std::size_t>(j)] = c.a * ak;
    wb[static_cast<std::size_t>(j)] = c.b * ak;
  }
  std::vector<double> lhs(set.records.size()), rhs(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const auto& rec = set.records[i];
    const auto prof = nested_ric_profile(rec, k, r);
    std::vector<double> y(prof.size());
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = wb[j] - wa[j] * prof[j];
    rhs[i] = quad::integrate(y, h, r);
    lhs[i] = omega * truncated_F_integral(rec, r);
  }
  const auto pr = detail::paired(lhs, rhs);
  auto b = detail::row(ws, "check_average_volume", k, r, kappa);
  b.h = h;
  b.lhs = pr.lhs;
  b.rhs = pr.rhs;
  b.margin = pr.margin;
  b.mc_stderr = pr.se;
  const auto rbar = ws.scalar();
  b.extras = {{"V_k", specialfn::model_volume(mp, r)},
              {"rhs_closed", detail::volume_rhs_closed(mp, kappa, rbar.mean - n * (n - 1) * k, r)}};
  if (auto fail = detail::check_ric_k_range(ws, k, 0.0, kappa)) {
    detail::fill_hypothesis_failure(b, *fail);
    return {b};
  }
  b.verdict = detail::judge(b.margin, b.mc_stderr, b.rhs, detail::curvature_is(spec.meta, k));
  detail::add_note(b, "lhs = truncated volume (upper bound for the ball volume)");
  return {b};
}

/// |N| <= V_k(L) - (R_k-bar / (n kappa)) * integral over [0, L] of (1 - exp(-kappa sigma_k)) A_k,
/// with L = pi / sqrt(k) for k > 0 and L = diam(N) otherwise.
inline std::vector<BoundReport> check_total_volume(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k");
  const auto& spec = ws.spec();
  const int n = spec.n;
  if (!spec.meta.volume) throw ConfigError("check_total_volume needs the manifold volume");
  double upper;
  if (k > 0.0) {
    upper = specialfn::first_zero(k);
  } else {
    if (!spec.meta.diameter) throw ConfigError("check_total_volume with k <= 0 needs the manifold diameter");
    upper = *spec.meta.diameter;
  }
  const double kappa = detail::kappa_param(ws, p, k);
  const detail::ModelSpaceParams mp{k, n};
  const auto rbar = ws.scalar();
  const double rbar_k = rbar.mean - n * (n - 1) * k;
  const double integral = detail::total_volume_integral(mp, kappa, upper);
  auto b = detail::row(ws, "check_total_volume", k, kAbsent, kappa);
  b.lhs = *spec.meta.volume;
  b.rhs = specialfn::model_volume(mp, upper) - rbar_k / (n * kappa) * integral;
  b.margin = b.rhs - b.lhs;
  b.mc_stderr = rbar.std_error * integral / (n * kappa);
  b.extras = {{"upper", upper}, {"V_k_upper", specialfn::model_volume(mp, upper)}, {"Rbar", rbar.mean}};
  if (auto fail = detail::check_ric_k_range(ws, k, 0.0, kappa)) {
    detail::fill_hypothesis_failure(b, *fail);
    return {b};
  }
  b.verdict = detail::judge(b.margin, b.mc_stderr, b.rhs, detail::curvature_is(spec.meta, k));
  if (k <= 0.0) detail::add_note(b, "diameter variant");
  return {b};
}

/// E[H] <= F_k'/F_k - (R_k-bar / n) phi_k(r), plus the rigidity row E[H] vs F_k'/F_k.
inline std::vector<BoundReport> check_average_H(Workspace& ws, const Params& p) {
  const double k = detail::need(p.k, "k"), r = detail::need(p.r, "r");
  const auto& spec = ws.spec();
  const int n = spec.n;
  detail::require_radius(spec, r, k, true, "check_average_H");
  const detail::ModelSpaceParams mp{k, n};
  const double model = specialfn::model_mean_curvature(mp, r);
  const auto& set = ws.records(r);
  std::vector<double> lhs(set.records.size()), rhs(lhs.size()), gap(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    lhs[i] = mean_curvature_H(set.records[i], r);
    rhs[i] = model - single_ric_integral(set.records[i], k, r);
    gap[i] = model - lhs[i];
  }
  const auto pr = detail::paired(lhs, rhs);
  const bool eq = detail::curvature_is(spec.meta, k);
  auto b = detail::row(ws, "check_average_H", k, r);
  b.h = set.h();
  b.lhs = pr.lhs;
  b.rhs = pr.rhs;
  b.margin = pr.margin;
  b.mc_stderr = pr.se;
  b.verdict = detail::judge(b.margin, b.mc_stderr, model, eq);
  const auto rbar = ws.scalar();
  b.extras = {{"model", model}, {"rhs_closed", model - (rbar.mean - n * (n - 1) * k) / n * specialfn::phi_k(mp, r)}};

  auto rig = detail::row(ws, "check_average_H/rigidity", k, r);
  rig.h = set.h();
  rig.lhs = pr.lhs;
  rig.rhs = model;
  rig.margin = model - pr.lhs;
  rig.mc_stderr = estimate(gap).std_error;
  double hyp_margin = 0.0;
  const bool hyp = detail::scalar_hypothesis(rbar, n, k, &hyp_margin);
  rig.extras = {{"hypothesis_margin", hyp_margin}};
  if (!hyp) {
    detail::fill_hypothesis_failure(rig, "hypothesis fails: Rbar < n(n-1)k");
  } else {
    double band = 0.0;
    const Verdict v = detail::judge(rig.margin, rig.mc_stderr, model, true, &band);
    if (v == Verdict::holds_at_equality) {
      detail::add_note(rig, "rigidity predicts constant curvature");
      if (eq) {
        rig.verdict = Verdict::holds_at_equality;
        detail::add_note(rig, "metadata confirms");
      } else if (spec.meta.constant_curvature) {
        rig.verdict = Verdict::violated;
        detail::add_note(rig, "metadata contradicts");
      } else {
        rig.verdict = Verdict::inconclusive;
      }
    } else {
      rig.verdict = v;
    }
  }
  return {b, rig};
}

/// min over sampled p of the fiber average of H(p, r, .) <= 1/r on a surface.
inline std::vector<BoundReport> check_gauss_bonnet_2d(Workspace& ws, const Params& p) {
  const double r = detail::need(p.r, "r");
  const auto& spec = ws.spec();
  if (spec.n != 2) throw ConfigError("check_gauss_bonnet_2d applies to surfaces only");
  detail::require_radius(spec, r, 0.0, true, "check_gauss_bonnet_2d");
  constexpr int directions = 8;
  const std::size_t points = spec.meta.homogeneous ? 1 : std::min<std::size_t>(2000, ws.sample_count());
  const std::uint64_t seed = detail::derived_seed(ws.settings().seed, 2);
  std::vector<double> mean(points), sd(points);
  parallel_for(points, ws.settings().threads, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    const ChartPoint pt = spec.meta.homogeneous ? spec.base_point : spec.sample_point(rng);
    const double offset = 2.0 * std::numbers::pi * uniform01(rng);
    const Mat basis = orthonormal_basis(metric_at(spec, pt));
    std::vector<double> hs;
    for (int j = 0; j < directions; ++j) {
      const double a = offset + 2.0 * std::numbers::pi * j / directions;
      const Vec theta = basis * Eigen::Vector2d(std::cos(a), std::sin(a));
      hs.push_back(mean_curvature_H(shoot(spec, {pt, theta, 1.0, static_cast<std::uint64_t>(j)}, r, ws.shoot_options(r)), r));
    }
    const auto e = estimate(hs);
    mean[i] = e.mean;
    sd[i] = e.std_error;
  });
  const auto it = std::min_element(mean.begin(), mean.end());
  const std::size_t at = static_cast<std::size_t>(it - mean.begin());
  auto b = detail::row(ws, "check_gauss_bonnet_2d", kAbsent, r);
  b.samples = points;
  b.h = detail::effective_h(ws, r);
  b.lhs = *it;
  b.rhs = 1.0 / r;
  b.margin = b.rhs - b.lhs;
  b.mc_stderr = sd[at];
  b.verdict = detail::judge(b.margin, b.mc_stderr, b.rhs, detail::curvature_is(spec.meta, 0.0));
  b.extras = {{"fiber_directions", directions}};
  detail::add_note(b, "lhs = min over sampled points of the fiber average of H");
  return {b};
}

/// Fits |B_p(r)| / ((omega/n) r^n) - 1 = c2 r^2 + c4 r^4 at the base point and compares c2 with -R(p) / (6 (n + 2)).
inline std::vector<BoundReport> check_taylor_volume(Workspace& ws, const Params& p) {
  const auto& spec = ws.spec();
  const int n = spec.n;
  std::vector<double> rs = p.r_list.empty() ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5} : p.r_list;
  if (rs.size() < 2) throw DomainError("check_taylor_volume needs at least two radii");
  const double r_max = *std::max_element(rs.begin(), rs.end());
  for (double r : rs) detail::require_radius(spec, r, 0.0, true, "check_taylor_volume");
  const auto rule = quad::sphere_rule(n - 1, 6);
  const auto set = build_records(spec, fiber_rule(spec, spec.base_point, rule, Mat::Identity(n, n)), r_max,
                                 ws.shoot_options(r_max), ws.settings().threads, ws.settings().seed);
  const double omega = specialfn::area_unit_sphere(n - 1);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rs.size()), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rs.size()));
  for (std::size_t j = 0; j < rs.size(); ++j) {
    const double r = rs[j];
    const double vol = truncated_volume(set, r).mean;
    const auto row = static_cast<Eigen::Index>(j);
    x(row, 0) = r * r;
    x(row, 1) = r * r * r * r;
    y[row] = vol / (omega / n * std::pow(r, n)) - 1.0;
  }
  const Eigen::VectorXd c = x.colPivHouseholderQr().solve(y);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  const double scalar = curvature(spec, spec.base_point).scalar;
  const double expected = 0.0 - scalar / (6.0 * (n + 2));
  const double tol = std::abs(expected) > 1e-8 ? 0.02 * std::abs(expected) : 1e-4;
  auto b = detail::row(ws, "check_taylor_volume", kAbsent, r_max);
  b.samples = rule.points.size();
  b.h = set.h();
  b.lhs = c[0];
  b.rhs = expected;
  b.margin = b.rhs - b.lhs;
  b.verdict = std::abs(b.margin) <= tol ? Verdict::holds : Verdict::violated;
  b.extras = {{"c4", c[1]}, {"tolerance", tol}, {"condition", cond}, {"R_p", scalar}};
  detail::add_note(b, "lhs = fitted r^2 coefficient at the base point, rhs = -R(p)/(6(n+2)); identity check");
  return {b};
}

/// On the S^2 x H^2 model: V-tilde(r) > (omega_3 / 4) r^4 with relative excess close to r^4 / 3456.
inline std::vector<BoundReport> check_counterexample(Workspace& ws, const Params& p) {
  const auto& spec = ws.spec();
  if (spec.name != "s2xh2" && spec.name != "product:sphere-2*hyperbolic-2")
    throw ConfigError("check_counterexample runs on the s2xh2 product model only");
  std::vector<double> rs = p.r_list.empty() ? std::vector<double>{0.3, 0.5} : p.r_list;
  const double r_max = *std::max_element(rs.begin(), rs.end());
  for (double r : rs) detail::require_radius(spec, r, 0.0, true, "check_counterexample");
  ShootOptions opt;
  if (ws.settings().h > 0.0)
    opt.h = std::min(ws.settings().h, r_max);
  else
    opt.steps = 4096;
  const auto rule = quad::sphere_rule(3, 6);
  const auto set = build_records(spec, fiber_rule(spec, spec.base_point, rule, Mat::Identity(4, 4)), r_max, opt,
                                 ws.settings().threads, ws.settings().seed);
  const double omega3 = specialfn::area_unit_sphere(3);
  std::vector<BoundReport> out;
  for (double r : rs) {
    auto b = detail::row(ws, "check_counterexample", kAbsent, r);
    b.samples = rule.points.size();
    b.h = set.h();
    b.lhs = omega3 / 4.0 * std::pow(r, 4);
    b.rhs = truncated_volume(set, r).mean;
    b.margin = b.rhs - b.lhs;
    const double rel = b.margin / b.lhs, predicted = std::pow(r, 4) / 3456.0, ratio = rel / predicted;
    b.verdict = b.margin > 0.0 && ratio >= 0.5 && ratio <= 2.0 ? Verdict::holds : Verdict::violated;
    b.extras = {{"relative_excess", rel}, {"predicted", predicted}, {"ratio", ratio}};
    detail::add_note(b, "fiber quadrature at the base point; Ric_k hypothesis cannot be dropped");
    out.push_back(b);
  }
  return out;
}

/// Integrated form E[log(F/F_k)](r) <= -(R_k-bar / n) psi_k(r), one row per grid node on shared records.
inline std::vector<BoundReport> sweep_log_ratio(Workspace& ws, double k, const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("sweep: empty grid");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1])) throw DomainError("sweep: grid must be strictly increasing");
  const int n = ws.spec().n;
  for (double r : grid) detail::require_radius(ws.spec(), r, k, true, "sweep");
  const auto& set = ws.records(grid.back());
  const detail::ModelSpaceParams mp{k, n};
  const bool eq = detail::curvature_is(ws.spec().meta, k);
  std::vector<BoundReport> out;
  double previous = kAbsent;
  for (double r : grid) {
    const double logfk = std::log(specialfn::model_density_Fk(mp, r));
    std::vector<double> lhs(set.records.size()), rhs(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double f = jacobian_F(set.records[i], r);
      if (f <= 0.0) throw DomainError("sweep: F is not positive on a record");
      lhs[i] = std::log(f) - logfk;
      rhs[i] = -nested_ric_integral(set.records[i], k, r);
    }
    const auto pr = detail::paired(lhs, rhs);
    auto b = detail::row(ws, "sweep_log_ratio", k, r);
    b.h = set.h();
    b.lhs = pr.lhs;
    b.rhs = pr.rhs;
    b.margin = pr.margin;
    b.mc_stderr = pr.se;
    b.verdict = detail::judge(b.margin, b.mc_stderr, std::max(std::abs(b.lhs), std::abs(b.rhs)), eq);
    b.extras = {{"lhs_stderr", estimate(lhs).std_error}};
    if (std::isfinite(previous)) b.extras.push_back({"step", b.lhs - previous});
    previous = b.lhs;
    detail::add_note(b, "lhs = E[log(F/F_k)]");
    out.push_back(b);
  }
  return out;
}

struct TheoremInfo {
  std::string id;
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::string summary;
  Evaluator run;
  /// Reason to leave the theorem out of "all", or nothing when it applies.
  std::function<std::optional<std::string>(const ManifoldSpec&, const Params&)> skip;
};

inline const std::vector<TheoremInfo>& registry() {
  using Skip = std::optional<std::string>;
  auto needs_k_r = [](const ManifoldSpec&, const Params& p) -> Skip {
    if (!p.k || !p.r) return "requires k and r";
    return std::nullopt;
  };
  static const std::vector<TheoremInfo> table = {
      {"check_green", {"k"}, {}, "conjugate radius <= pi/sqrt(k) when Rbar >= n(n-1)k", check_green,
       [](const ManifoldSpec&, const Params& p) -> Skip {
         if (!p.k || *p.k <= 0.0) return "requires k > 0";
         return std::nullopt;
       }},
      {"check_volume_lower", {}, {"l"}, "|N| >= l^2/(n(n-1)pi^2) * integral of R when conj >= l", check_volume_lower,
       [](const ManifoldSpec& s, const Params&) -> Skip {
         if (!s.meta.volume) return "volume unknown";
         return std::nullopt;
       }},
      {"check_jacobian_bound", {"k", "r"}, {}, "F <= exp(-nested Ricci integral) F_k pointwise", check_jacobian_bound,
       needs_k_r},
      {"check_mean_curvature_bound", {"k", "r"}, {}, "H <= F_k'/F_k - single Ricci integral pointwise",
       check_mean_curvature_bound, needs_k_r},
      {"check_monotone", {"k", "r"}, {"r_grid"}, "d/dr E[log(F/F_k)] <= -(Rbar_k/n) phi_k", check_monotone,
       [](const ManifoldSpec&, const Params& p) -> Skip {
         if (!p.k || (!p.r && p.r_grid.empty())) return "requires k and r";
         return std::nullopt;
       }},
      {"check_min_F", {"k", "r"}, {}, "min F <= exp(-(Rbar_k/n) psi_k) F_k", check_min_F, needs_k_r},
      {"check_average_area", {"k", "r"}, {"kappa", "kappa1", "kappa2", "s"},
       "A-bar(r) <= (b - a (Rbar_k/n) sigma_k) A_k", check_average_area, needs_k_r},
      {"check_average_volume", {"k", "r"}, {"kappa"}, "V-tilde(r) <= integral of (b - a (Rbar_k/n) sigma_k) A_k",
       check_average_volume, needs_k_r},
      {"check_total_volume", {"k"}, {"kappa"}, "|N| <= V_k(L) - (Rbar_k/(n kappa)) integral of (1 - e^(-kappa sigma_k)) A_k",
       check_total_volume,
       [](const ManifoldSpec& s, const Params& p) -> Skip {
         if (!p.k) return "requires k";
         if (!s.meta.volume) return "volume unknown";
         if (*p.k <= 0.0 && !s.meta.diameter) return "k <= 0 needs the diameter, which is unknown";
         return std::nullopt;
       }},
      {"check_average_H", {"k", "r"}, {}, "E[H] <= F_k'/F_k - (Rbar_k/n) phi_k, with rigidity row", check_average_H,
       needs_k_r},
      {"check_gauss_bonnet_2d", {"r"}, {}, "some p has fiber-average H <= 1/r on a surface", check_gauss_bonnet_2d,
       [](const ManifoldSpec& s, const Params& p) -> Skip {
         if (s.n != 2) return "surfaces only";
         if (!p.r) return "requires r";
         return std::nullopt;
       }},
      {"check_taylor_volume", {}, {"r_list"}, "small-ball volume coefficient -R(p)/(6(n+2))", check_taylor_volume,
       [](const ManifoldSpec&, const Params&) -> Skip { return std::nullopt; }},
      {"check_counterexample", {}, {"r_list"}, "V-tilde > (omega_3/4) r^4 on S^2 x H^2", check_counterexample,
       [](const ManifoldSpec& s, const Params&) -> Skip {
         if (s.name != "s2xh2" && s.name != "product:sphere-2*hyperbolic-2") return "s2xh2 only";
         return std::nullopt;
       }},
  };
  return table;
}

inline const TheoremInfo& find_theorem(const std::string& id) {
  for (const auto& t : registry())
    if (t.id == id) return t;
  throw ConfigError("unknown theorem '" + id + "'");
}

/// Runs one theorem, or every applicable one for id "all".
inline std::vector<BoundReport> run(Workspace& ws, const std::string& id, const Params& p,
                                    std::vector<std::string>* skipped = nullptr) {
  std::vector<BoundReport> out;
  if (id != "all") {
    const auto& t = find_theorem(id);
    if (auto why = t.skip(ws.spec(), p)) throw ConfigError(id + " is not applicable: " + *why);
    return t.run(ws, p);
  }
  for (const auto& t : registry()) {
    if (auto why = t.skip(ws.spec(), p)) {
      if (skipped) skipped->push_back(t.id + ": " + *why);
      continue;
    }
    auto rows = t.run(ws, p);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace riemlab::theorems
