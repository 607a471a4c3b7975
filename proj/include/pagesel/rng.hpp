#pragma once

#include <cstdint>

namespace pagesel {

/// splitmix64; fixed across platforms so seeded outputs are reproducible
/// everywhere (the standard-library distributions are not).
struct SplitMix64 {
  uint64_t state;

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

inline uint64_t mix_seed(uint64_t base, uint64_t index) {
  SplitMix64 s{base ^ (0x9E3779B97F4A7C15ull * (index + 1))};
  return s.next();
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : s_{seed} {}

  uint64_t next_u64() { return s_.next(); }

  /// Uniform in [0, n); n = 0 yields 0. Modulo bias is irrelevant here.
  uint32_t below(uint32_t n) { return n == 0 ? 0 : static_cast<uint32_t>(next_u64() % n); }

  /// Uniform in [lo, hi], inclusive.
  uint32_t range(uint32_t lo, uint32_t hi) { return lo + below(hi - lo + 1); }

  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

 private:
  SplitMix64 s_;
};

}  // namespace pagesel
