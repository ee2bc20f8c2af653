#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rgg {

/// SplitMix64 finalizer. Used to expand seeds and to derive child streams.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child stream seed for `stream_id` under `master_seed`. Distinct labels give
/// statistically independent streams; the mapping is a pure function so that
/// any stream can be regenerated in isolation.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
  return mix64(mix64(master_seed) ^ mix64(stream_id + 0x632be59bd9b4e019ULL));
}

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator, so it plugs
/// into <random> distributions; the hot paths use uniform01() directly.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;
  Rng(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : Rng(derive_seed(master_seed, stream_id)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform torus coordinate in [-1/2, 1/2).
  double torus_coordinate() noexcept { return uniform01() - 0.5; }

  /// Standard normal via Box-Muller (no cached second variate; keeps the
  /// stream position a function of call count only).
  double normal() noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace rgg
