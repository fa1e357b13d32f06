#include "triform/random.hpp"

#include <cmath>

namespace triform {

uint64_t splitmix64(uint64_t state) {
  uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t seed, uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

FormationSpec sample_spec(Rng& rng, double lo, double hi) {
  const double llo = std::log(lo), lhi = std::log(hi);
  for (;;) {
    const double d1 = std::exp(rng.uniform(llo, lhi));
    const double d2 = std::exp(rng.uniform(llo, lhi));
    const double d3 = std::exp(rng.uniform(llo, lhi));
    if (d1 < d2 + d3 && d2 < d1 + d3 && d3 < d1 + d2) {
      return FormationSpec(d1, d2, d3);
    }
  }
}

}  // namespace triform
