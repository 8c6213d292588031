#pragma once

#include <cstdint>

namespace tentlab {

/// splitmix64 scrambling round applied to a value.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Child seed for task `index` under a master seed. Scans and trial batches
/// seed each unit of work through this, so results do not depend on
/// scheduling or thread count.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index + 0x9e3779b97f4a7c15ull));
}

/// Deterministic 64-bit PRNG (splitmix64). Cheap enough to construct one
/// per orbit, column or trial.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-half_width, half_width).
  double next_symmetric(double half_width) noexcept {
    return (2.0 * next_unit() - 1.0) * half_width;
  }

 private:
  std::uint64_t state_;
};

}  // namespace tentlab
