#pragma once

#include <cstdint>
#include <random>

#include "btcpanel/stats.hpp"

namespace btcpanel {

// Deterministic random source for the data generators: Mersenne Twister
// mt19937_64 (bit-identical across platforms), with Gaussian draws produced
// by the inverse-CDF transform of a single uniform so streams stay
// reproducible regardless of how many normals are consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), root_(seed) {}

  // Independent substream: splitmix64 mix of the root seed and an index.
  Rng substream(std::uint64_t index) const {
    std::uint64_t z = root_ + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  std::uint64_t raw() { return engine_(); }

  // Uniform on (0, 1): 53-bit mantissa, never exactly 0 or 1.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return mean + sd * normal_quantile(uniform());
  }

  // Inclusive bounds; modulo bias is negligible for the ranges used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo +
           static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t root_;
};

}  // namespace btcpanel
