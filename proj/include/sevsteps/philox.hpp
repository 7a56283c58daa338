#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  Every draw
// is a pure function of (key, counter), so streams can be generated in any
// order and on any thread with identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace sevsteps {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit constexpr Philox4x32(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  constexpr Block operator()(Block counter) const noexcept {
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      counter = single_round(counter, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return counter;
  }

  /// Block for a 128-bit counter given as two 64-bit halves.
  constexpr Block operator()(std::uint64_t hi, std::uint64_t lo) const noexcept {
    return (*this)(Block{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                         static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)});
  }

  /// Two independent uniforms in (0, 1) with 53-bit resolution.
  std::pair<double, double> uniforms(std::uint64_t hi, std::uint64_t lo) const noexcept {
    const Block b = (*this)(hi, lo);
    const std::uint64_t a = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    const std::uint64_t c = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
    return {to_open_unit(a), to_open_unit(c)};
  }

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normals(std::uint64_t hi, std::uint64_t lo) const noexcept {
    const auto [u1, u2] = uniforms(hi, lo);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53U;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

  static constexpr Block single_round(const Block& c, const std::array<std::uint32_t, 2>& key) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return Block{hi1 ^ c[1] ^ key[0], lo1, hi0 ^ c[3] ^ key[1], lo0};
  }

  static double to_open_unit(std::uint64_t x) noexcept {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
};

/// SplitMix64 finaliser; derives independent keys from (seed, domain).
constexpr std::uint64_t mix_key(std::uint64_t seed, std::uint64_t domain) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (domain + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key domains, so that noise, data and probes never share a stream.
enum class RngDomain : std::uint64_t { Noise = 1, Potential = 2, InitialData = 3, Probe = 4, Bootstrap = 5, Test = 6 };

inline Philox4x32 make_generator(std::uint64_t seed, RngDomain domain) {
  return Philox4x32(mix_key(seed, static_cast<std::uint64_t>(domain)));
}

}  // namespace sevsteps
