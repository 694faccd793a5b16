#pragma once

#include <cstdint>
#include <limits>

#include "rmt/common.hpp"

namespace rmt {

// Stream identifiers. Every random quantity in the library is drawn from a
// stream keyed by (seed, tag, i, j), so results never depend on thread count
// or on the order in which entries are visited.
namespace stream_tag {
inline constexpr std::uint64_t entry = 0x01;
inline constexpr std::uint64_t goe = 0x02;
inline constexpr std::uint64_t label = 0x03;
inline constexpr std::uint64_t conditioned = 0x04;
inline constexpr std::uint64_t ou_noise = 0x05;
inline constexpr std::uint64_t split_noise = 0x06;
inline constexpr std::uint64_t deviation_x = 0x07;
inline constexpr std::uint64_t deviation_y = 0x08;
inline constexpr std::uint64_t bootstrap = 0x09;
inline constexpr std::uint64_t replica = 0x0a;
inline constexpr std::uint64_t scalar = 0x0b;
}  // namespace stream_tag

std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives an independent 64-bit seed from a parent seed and an index.
Seed derive_seed(Seed parent, std::uint64_t tag, std::uint64_t index) noexcept;

// SplitMix64 generator keyed by (seed, tag, i, j). Satisfies
// UniformRandomBitGenerator so it can drive Boost.Random distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(Seed seed, std::uint64_t tag, std::uint64_t i = 0, std::uint64_t j = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace rmt
