#pragma once

#include <cstdint>

namespace vsnopt {

// SplitMix64. Chosen for scenario generation because it is trivially
// portable: the output stream depends only on the 64-bit seed, never on
// the platform or standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1]: raw draw scaled by 2^-64.
  double next_unit() { return static_cast<double>(next()) * 0x1.0p-64; }

  // Uniform integer over the closed interval [lo, hi], lo <= hi,
  // by modular reduction of one raw draw.
  std::int64_t next_in_range(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    return lo + static_cast<std::int64_t>(next() % span);
  }

 private:
  std::uint64_t state_;
};

}  // namespace vsnopt
