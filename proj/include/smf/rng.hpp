#ifndef SMF_RNG_HPP
#define SMF_RNG_HPP

#include <cmath>
#include <cstdint>

namespace smf {

/// Counter-based pseudorandom generator.
///
/// Output i is a pure function of (seed, i): the SplitMix64 finalizer
/// applied to seed + (i+1) * 0x9E3779B97F4A7C15 (Steele, Lea & Flood 2014).
/// Only 64-bit integer arithmetic is used, so streams are reproducible
/// bit-for-bit across platforms and languages.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Unbiased integer in [0, bound) by rejection on the top range.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  /// Box-Muller transform; consumes exactly two counter positions.
  double next_normal(double mean, double stddev) {
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * mag * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace smf

#endif  // SMF_RNG_HPP
