#pragma once

// User manifolds from JSON manifests: one chart whose axes are all periodic
// (a torus topology), with the metric given by a named form and expressions.
// The schema is described in docs/manifest.md.

#include "riemlab/expression.hpp"
#include "riemlab/manifold.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace riemlab::manifest {

namespace detail {

using Json = nlohmann::json;

inline const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("manifest: missing field '") + key + "'");
  return j.at(key);
}

inline double positive(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number() || !(v.get<double>() > 0.0))
    throw ConfigError(std::string("manifest: '") + key + "' must be a positive number");
  return v.get<double>();
}

inline std::optional<double> optional_positive(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return positive(j, key);
}

inline std::vector<double> numbers(const Json& j, const char* key, int n) {
  const Json& v = require(j, key);
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw ConfigError(std::string("manifest: '") + key + "' must list " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("manifest: '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline Expression expression(const Json& v, int n, const std::string& where) {
  if (v.is_number()) return Expression::parse(v.dump(), n);
  if (!v.is_string()) throw ConfigError("manifest: " + where + " must be a string or number");
  return Expression::parse(v.get<std::string>(), n);
}

/// Metric function for the "metric" object.
inline std::function<Mat(const Vec&)> metric(const Json& m, int n) {
  const std::string form = require(m, "form").get<std::string>();
  if (form == "euclidean") return [n](const Vec&) -> Mat { return Mat::Identity(n, n); };
  if (form == "conformal") {
    const Expression f = expression(require(m, "factor"), n, "metric.factor");
    return [f, n](const Vec& x) -> Mat { return Mat::Identity(n, n) * f(x); };
  }
  if (form == "diagonal") {
    const Json& e = require(m, "entries");
    if (!e.is_array() || static_cast<int>(e.size()) != n)
      throw ConfigError("manifest: diagonal metric needs " + std::to_string(n) + " entries");
    std::vector<Expression> d;
    for (int i = 0; i < n; ++i) d.push_back(expression(e[i], n, "metric.entries"));
    return [d, n](const Vec& x) -> Mat {
      Mat g = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) g(i, i) = d[static_cast<std::size_t>(i)](x);
      return g;
    };
  }
  if (form == "matrix") {
    const Json& e = require(m, "entries");
    if (!e.is_array() || static_cast<int>(e.size()) != n)
      throw ConfigError("manifest: matrix metric needs " + std::to_string(n) + " rows");
    std::vector<Expression> upper;
    for (int i = 0; i < n; ++i) {
      if (!e[i].is_array() || static_cast<int>(e[i].size()) != n)
        throw ConfigError("manifest: matrix metric rows need " + std::to_string(n) + " entries");
      for (int j = i; j < n; ++j) {
        if (e[i][j] != e[j][i]) throw ConfigError("manifest: matrix metric must be symmetric");
        upper.push_back(expression(e[i][j], n, "metric.entries"));
      }
    }
    return [upper, n](const Vec& x) -> Mat {
      Mat g(n, n);
      std::size_t q = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g(i, j) = g(j, i) = upper[q++](x);
      return g;
    };
  }
  throw ConfigError("manifest: unknown metric form '" + form + "'");
}

inline double volume_density(const std::function<Mat(const Vec&)>& g, const Vec& x) {
  return std::sqrt(std::max(0.0, g(x).determinant()));
}

/// Calls f at every node of a uniform midpoint grid with m points per axis.
template <class F>
void grid(const std::vector<double>& lo, const std::vector<double>& hi, int m, F&& f) {
  const int n = static_cast<int>(lo.size());
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vec x(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      x[i] = lo[u] + (hi[u] - lo[u]) * (idx[u] + 0.5) / m;
    }
    f(x);
    int axis = 0;
    while (axis < n && ++idx[static_cast<std::size_t>(axis)] == m) idx[static_cast<std::size_t>(axis++)] = 0;
    if (axis == n) return;
  }
}

inline int grid_points_per_axis(int n) {
  return std::max(8, static_cast<int>(std::floor(std::pow(200000.0, 1.0 / n))));
}

inline ManifoldSpec build(const Json& j) {
  if (!j.is_object()) throw ConfigError("manifest: top level must be an object");
  ManifoldSpec s;
  s.name = require(j, "name").get<std::string>();
  const Json& dim = require(j, "dimension");
  if (!dim.is_number_integer() || dim.get<int>() < 2 || dim.get<int>() > kMaxDim)
    throw ConfigError("manifest: dimension must be an integer in [2, " + std::to_string(kMaxDim) + "]");
  const int n = dim.get<int>();
  s.n = n;
  const Json& box = require(j, "chart");
  const auto lo = numbers(box, "lo", n), hi = numbers(box, "hi", n);
  for (int i = 0; i < n; ++i)
    if (!(hi[static_cast<std::size_t>(i)] > lo[static_cast<std::size_t>(i)]))
      throw ConfigError("manifest: chart.hi must exceed chart.lo on every axis");
  if (box.contains("periodic")) {
    const Json& p = box.at("periodic");
    if (!p.is_array() || static_cast<int>(p.size()) != n ||
        !std::all_of(p.begin(), p.end(), [](const Json& v) { return v.is_boolean() && v.get<bool>(); }))
      throw ConfigError("manifest: only fully periodic charts are supported (every axis periodic)");
  }
  const auto g = metric(require(j, "metric"), n);

  Chart c;
  c.lo = lo;
  c.hi = hi;
  c.periodic.assign(static_cast<std::size_t>(n), true);
  c.metric = g;
  c.inside = [](const Vec&) { return true; };
  c.safe = [lo, hi](const Vec& x) {
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < lo[static_cast<std::size_t>(i)] || x[i] >= hi[static_cast<std::size_t>(i)]) return false;
    return true;
  };
  double min_side = hi[0] - lo[0];
  for (int i = 1; i < n; ++i) min_side = std::min(min_side, hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
  c.scale = min_side / (2.0 * std::numbers::pi);
  s.charts.push_back(c);
  s.relocate = [lo, hi, n](const ChartPoint& p) -> std::optional<Transition> {
    Vec x = p.x;
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double L = hi[u] - lo[u];
      x[i] -= L * std::floor((x[i] - lo[u]) / L);
      if (x[i] >= hi[u]) x[i] = lo[u];
    }
    return Transition{{0, x}, Mat::Identity(n, n)};
  };
  s.to_chart = [n](const ChartPoint& p, int target) -> std::optional<Transition> {
    if (target != 0) return std::nullopt;
    return Transition{p, Mat::Identity(n, n)};
  };
  Vec center(n);
  for (int i = 0; i < n; ++i) center[i] = 0.5 * (lo[static_cast<std::size_t>(i)] + hi[static_cast<std::size_t>(i)]);
  s.base_point = {0, center};

  // Positive definiteness and volume by the midpoint rule (spectral for periodic integrands).
  const int m = grid_points_per_axis(n);
  double total = 0.0, peak = 0.0, cell = 1.0;
  for (int i = 0; i < n; ++i) cell *= (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / m;
  grid(lo, hi, m, [&](const Vec& x) {
    const Mat gx = g(x);
    if (!gx.allFinite()) throw ConfigError("manifest: metric is not finite inside the chart");
    Eigen::SelfAdjointEigenSolver<Mat> eig(gx, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) throw ConfigError("manifest: metric is not positive definite inside the chart");
    const double d = std::sqrt(gx.determinant());
    total += d * cell;
    peak = std::max(peak, d);
  });

  s.meta.injectivity_radius = positive(j, "injectivity_radius");
  s.meta.diameter = optional_positive(j, "diameter");
  s.meta.volume = optional_positive(j, "volume");
  if (!s.meta.volume) s.meta.volume = total;
  if (j.contains("homogeneous")) s.meta.homogeneous = j.at("homogeneous").get<bool>();
  if (j.contains("constant_curvature") && !j.at("constant_curvature").is_null())
    s.meta.constant_curvature = j.at("constant_curvature").get<double>();
  if (j.contains("note")) s.meta.note = j.at("note").get<std::string>();

  // Rejection sampler against the Riemannian density sqrt(det g).
  double bound = 1.25 * peak;
  if (j.contains("sampler")) {
    const Json& smp = j.at("sampler");
    if (smp.contains("density_bound")) bound = positive(smp, "density_bound");
  }
  s.sample_point = [lo, hi, g, bound, n](Rng& rng) {
    for (int attempt = 0; attempt < 1000000; ++attempt) {
      Vec x(n);
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        x[i] = lo[u] + (hi[u] - lo[u]) * uniform01(rng);
      }
      const double d = volume_density(g, x);
      if (d > bound) {
        std::ostringstream os;
        os << "rejection sampler: density " << d << " exceeds the bound " << bound << " (ratio " << d / bound << ")";
        throw SamplerError(os.str());
      }
      if (uniform01(rng) * bound < d) return ChartPoint{0, x};
    }
    throw SamplerError("rejection sampler: no acceptance in 1e6 proposals");
  };
  return s;
}

}  // namespace detail

/// Builds a manifold from a parsed manifest.
inline ManifoldSpec from_json(const nlohmann::json& j) {
  try {
    return detail::build(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

inline ManifoldSpec load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + path + "': " + e.what());
  }
  return from_json(j);
}

}  // namespace riemlab::manifest
