#pragma once

// Per-sample random streams. Stream i of a run depends only on (seed, i), so
// results do not depend on how samples are distributed over threads.

#include "riemlab/linalg.hpp"

#include <cstdint>
#include <random>

namespace riemlab {

using Rng = std::mt19937_64;

inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return Rng(seq);
}

/// Uniform point on the unit sphere S^{m-1} in R^m (normalized Gaussian).
inline Vec uniform_unit_vector(Rng& rng, int m) {
  std::normal_distribution<double> normal;
  Vec u(m);
  double norm = 0.0;
  do {
    for (int i = 0; i < m; ++i) u[i] = normal(rng);
    norm = u.norm();
  } while (norm < 1e-12);
  return u / norm;
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace riemlab
