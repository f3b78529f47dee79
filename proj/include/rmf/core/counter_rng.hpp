#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "rmf/core/vec3.hpp"

namespace rmf {

// Philox4x32-10 (Salmon et al., SC'11). A stateless bijection of a 128-bit
// counter under a 64-bit key; every random draw in the simulation is a pure
// function of (seed, realization, particle, step), so thread scheduling can
// never change the noise stream.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Draw streams. Each stream owns a disjoint slice of the counter space.
enum class Stream : std::uint32_t {
  initial_position = 0,
  brownian = 1,
  component_choice = 2,
  synthetic = 3,
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t realization)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        realization_(static_cast<std::uint32_t>(realization)),
        realization_hi_(static_cast<std::uint32_t>(realization >> 32)) {}

  // Four 32-bit words for (stream, a, b, block).
  Philox4x32::Counter block(Stream stream, std::uint32_t a, std::uint32_t b,
                            std::uint32_t blk) const {
    const std::uint32_t tag = (static_cast<std::uint32_t>(stream) << 24) ^ (realization_hi_ << 8) ^ blk;
    return Philox4x32::apply({a, b, realization_, tag}, key_);
  }

  // Two uniforms on the open interval (0, 1) with 53 random bits each.
  std::array<double, 2> uniforms(Stream stream, std::uint32_t a, std::uint32_t b,
                                 std::uint32_t blk) const {
    const auto w = block(stream, a, b, blk);
    const std::uint64_t u0 = (std::uint64_t{w[0]} << 32) | w[1];
    const std::uint64_t u1 = (std::uint64_t{w[2]} << 32) | w[3];
    return {to_open_unit(u0), to_open_unit(u1)};
  }

  // Standard normal 3-vector for (stream, a, b) via two Box-Muller pairs.
  Vec3 normal3(Stream stream, std::uint32_t a, std::uint32_t b) const {
    const auto p = uniforms(stream, a, b, 0);
    const auto q = uniforms(stream, a, b, 1);
    const double r1 = std::sqrt(-2.0 * std::log(p[0]));
    const double r2 = std::sqrt(-2.0 * std::log(q[0]));
    const double t1 = 2.0 * std::numbers::pi * p[1];
    const double t2 = 2.0 * std::numbers::pi * q[1];
    return {r1 * std::cos(t1), r1 * std::sin(t1), r2 * std::cos(t2)};
  }

  double uniform(Stream stream, std::uint32_t a, std::uint32_t b) const {
    return uniforms(stream, a, b, 2)[0];
  }

 private:
  static double to_open_unit(std::uint64_t u) {
    return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t realization_;
  std::uint32_t realization_hi_;
};

}  // namespace rmf
