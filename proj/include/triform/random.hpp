#pragma once

// Deterministic random sources. Distribution mappings are implemented here
// rather than taken from <random> so that identical seeds reproduce
// identical streams on every standard library.

#include <cstdint>
#include <random>

#include "triform/link_algebra.hpp"

namespace triform {

uint64_t splitmix64(uint64_t state);

/// Per-trial sub-seed derived from a run seed and a trial index.
uint64_t derive_seed(uint64_t seed, uint64_t index);

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double normal();

  Vec2 normal_vec2() { return Vec2(normal(), normal()); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Log-uniform distances in [lo, hi], rejection-filtered to the strict
/// triangle inequalities.
FormationSpec sample_spec(Rng& rng, double lo = 0.1, double hi = 10.0);

}  // namespace triform
