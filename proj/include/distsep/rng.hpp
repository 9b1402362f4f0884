// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace distsep {

// Deterministic draws on top of mt19937_64. The uniform mapping is written
// out explicitly (instead of std::uniform_real_distribution) because the
// standard leaves distribution algorithms implementation-defined and scene
// sampling must reproduce bit-for-bit across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [lo, hi) on the 53-bit grid.
  double uniform(double lo, double hi) {
    const double u = (eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // Standard normal via the explicit Box-Muller transform (no cached spare).
  double gaussian() {
    const double u1 = 1.0 - (eng_() >> 11) * 0x1.0p-53;  // (0, 1]
    const double u2 = (eng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 eng_;
};

// SplitMix64 finalizer, used to derive independent per-scene seeds from a
// base seed and scene coordinates.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t base, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t s = splitmix64(base);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

}  // namespace distsep
