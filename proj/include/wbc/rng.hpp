#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace wbc {

// splitmix64 finalizer; used for seeding and stream derivation.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// xoshiro256** with explicit stream derivation. All draws are produced from
// 64-bit integer arithmetic, so sequences are identical across platforms for
// a given (seed, stream); parallel workers can derive disjoint streams from
// one root seed without coordination.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) {
    uint64_t z = mix64(seed ^ mix64(stream));
    for (auto& w : state_) {
      z = mix64(z + 0x9E3779B97F4A7C15ULL);
      w = z;
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0.
  uint64_t below(uint64_t bound) {
    // Rejection sampling on the top bits keeps the draw exactly uniform.
    const uint64_t threshold = -bound % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Exponential with the given scale (mean). scale > 0.
  double exponential(double scale) { return -scale * std::log1p(-uniform01()); }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> state_;
};

}  // namespace wbc
