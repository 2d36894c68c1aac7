#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rank1part/errors.hpp"

namespace rank1part {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream-split generator. Every logical array draw gets its own
// (seed, stream) pair, so adding or reordering draws in one stream never
// perturbs the values of another. Backed by mt19937_64 keyed through
// splitmix64; normals use the polar Box-Muller transform so outputs depend
// only on the engine, not on library-specific distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (stream + 1);
    engine_.seed(splitmix64(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double x;
    double y;
    double r2;
    do {
      x = 2.0 * uniform01() - 1.0;
      y = 2.0 * uniform01() - 1.0;
      r2 = x * x + y * y;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    cached_ = y * f;
    has_cached_ = true;
    return x * f;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Index draw by inverse CDF over `probs` (need not be exactly normalized).
  int categorical(const std::vector<double>& probs) {
    if (probs.empty()) throw ArgumentError("categorical: empty probability vector");
    double total = 0.0;
    for (double p : probs) total += p;
    const double target = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (target < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace rank1part
