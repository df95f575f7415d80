#pragma once

#include <cstdint>

namespace hrt {

/// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
/// generators", OOPSLA 2014). Counter-based: output i is a fixed bijective
/// mix of seed + i * golden-ratio increment, so streams are identical on
/// every platform and trivially splittable by seed derivation.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bit() { return (next() >> 63) != 0; }

  /// Unbiased uniform integer in [0, bound), bound > 0, by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

/// Derives the seed for a parallel work item. Trial i always consumes the
/// stream seeded with derive_seed(base, i), so results do not depend on how
/// work is scheduled across threads.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  SplitMix64 g(base ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  return g.next();
}

}  // namespace hrt
