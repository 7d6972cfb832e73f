#pragma once

// SplitMix64: 64-bit Weyl-sequence state, golden-ratio increment, and the
// standard 30/27/31 finalizer. split() derives an independent stream by
// seeding a child with the parent's next output.

#include <cstdint>
#include <vector>

#include "tentomo/scalar.hpp"

namespace tentomo {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  SplitMix64 split() { return SplitMix64(next()); }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  /// Small rational p/q with |p| <= num_bound and 1 <= q <= den_bound.
  Rational rational(std::int64_t num_bound = 5, std::int64_t den_bound = 4) {
    const auto p = uniform_int(-num_bound, num_bound);
    const auto q = uniform_int(1, den_bound);
    return Rational(p, q);
  }

  /// Standard normal via Box-Muller.
  double normal();

  std::vector<double> unit_vector(int n);
  std::vector<double> point_in_ball(int n, double radius);

 private:
  std::uint64_t state_;
};

}  // namespace tentomo
