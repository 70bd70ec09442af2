#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace icm {

// splitmix64 finalizer; used to derive independent sub-seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic RNG. The engine (mt19937_64) has a standard-specified output
// sequence and every derived draw below is implemented here, so identical
// seeds give identical streams on any platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next() { return gen_(); }

  // Unbiased integer in [0, n). Rejection sampling keeps the draw exactly
  // uniform; n must be >= 1.
  uint64_t below(uint64_t n) {
    const uint64_t m = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
    uint64_t x = next();
    if (m != 0) {
      const uint64_t lim = UINT64_MAX - m + 1;  // largest multiple of n
      while (x >= lim) x = next();
    }
    return x % n;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1), both endpoints excluded.
  double unit_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes exactly two raw draws per call.
  double normal() {
    const double u1 = unit_open();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace icm
