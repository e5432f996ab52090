// Averages of Ric(gamma'(t)) over the unit tangent bundle stay constant in t.
// The manifold comes from an inline manifest.

#include "riemlab/bundle.hpp"
#include "riemlab/manifest.hpp"

#include <cstdio>

int main() {
  using namespace riemlab;
  const auto spec = manifest::from_json(nlohmann::json::parse(R"({
    "name": "bumpy-torus", "dimension": 2,
    "chart": {"lo": [0, 0], "hi": [6.283185307179586, 6.283185307179586]},
    "metric": {"form": "diagonal", "entries": ["1", "1 + 0.5 * cos(x)^2"]},
    "injectivity_radius": 1.0})"));
  const auto set = build_records(spec, sample_sn(spec, 1000, 3, 0), 1.0);
  const auto rbar = average_scalar(set);
  std::printf("Rbar/n = %.5f +- %.5f\n", rbar.mean / spec.n, rbar.std_error / spec.n);
  const std::vector<double> ts = {0.0, 0.5, 1.0};
  const auto table = liouville_check(set, ts, 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i)
    std::printf("t = %.1f  E[Ric] = %.5f +- %.5f\n", ts[i], table[i].mean, table[i].std_error);
  return 0;
}
