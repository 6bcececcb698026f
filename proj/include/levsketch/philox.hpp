#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace levsketch {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// Every random value in the library is a pure function of (key, counter),
/// so any element of a sketch can be regenerated independently of the
/// others and of the order in which workers visit them.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// SplitMix64 finalizer, used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// A keyed random stream addressed by 64-bit position.
///
/// Stream splitting: the key is mix64(seed ^ mix64(stream_id)), so operator
/// seed -> purpose/row substreams never collide in practice. Position p maps
/// to Philox counter (p_lo, p_hi, 0, 0); each block yields two 64-bit words.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept {
    const std::uint64_t k = mix64(seed ^ mix64(stream_id));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  /// Two independent 64-bit words at position p.
  std::array<std::uint64_t, 2> words(std::uint64_t p) const noexcept {
    const auto out = Philox4x32::block(
        {static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32), 0u, 0u}, key_);
    return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
  }

  std::uint64_t bits(std::uint64_t p) const noexcept { return words(p)[0]; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t p) const noexcept { return to_unit(bits(p)); }

  /// Standard normal via Box-Muller on the two words of position p.
  double normal(std::uint64_t p) const noexcept {
    const auto w = words(p);
    const double u1 = 1.0 - to_unit(w[0]);  // (0, 1]
    const double u2 = to_unit(w[1]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, bound) by rejection (unbiased).
  std::uint64_t below(std::uint64_t bound, std::uint64_t& position) const noexcept {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
    for (;;) {
      const std::uint64_t x = bits(position++);
      if (x >= limit) return x % bound;
    }
  }

  static double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

 private:
  Philox4x32::Key key_{};
};

}  // namespace levsketch
