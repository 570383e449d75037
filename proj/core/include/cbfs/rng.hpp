#pragma once

#include <cstdint>
#include <random>

namespace cbfs {

/// Seeded random stream with hand-rolled distributions so that a given seed
/// produces the same sequence on every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling over the top bits; unbiased and portable.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cbfs
