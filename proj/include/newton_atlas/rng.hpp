#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace newton_atlas {

// SplitMix64 (Steele, Lea, Flood). Small state, portable output, and good
// enough statistical quality for Monte Carlo at the scales used here.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

  double angle() noexcept { return 2.0 * std::numbers::pi * uniform(); }

 private:
  std::uint64_t state_;
};

/// Counter-mode seed splitting: the child seed depends only on (master, stream, index),
/// so parallel trials see the same seeds regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) noexcept {
  SplitMix64 a(master ^ (stream * 0xd1b54a32d192ed03ULL));
  const std::uint64_t s = a();
  SplitMix64 b(s ^ (index * 0x9e3779b97f4a7c15ULL) ^ 0x632be59bd9b4e019ULL);
  return b();
}

}  // namespace newton_atlas
