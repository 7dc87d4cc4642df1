#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

#include "hedgeff/types.hpp"

namespace hedgeff {

/// Philox4x32-10 block function (Salmon et al., Random123).
///
/// A keyed bijection on 128-bit counters; every (key, counter) pair maps to an
/// independent-looking block, so streams are addressed rather than advanced.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
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

/// Identifies one independent random stream: the run seed keys the cipher,
/// the stream index occupies the high counter words.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Uniform random bit generator over a single Philox stream.
///
/// Draw k of stream (seed, s) depends only on (seed, s, k); there is no
/// shared state between streams and no ordering coupling between paths.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(StreamId id) noexcept
      : key_{static_cast<std::uint32_t>(id.seed), static_cast<std::uint32_t>(id.seed >> 32)},
        hi_{static_cast<std::uint32_t>(id.stream), static_cast<std::uint32_t>(id.stream >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (slot_ == 2) refill();
    const std::uint64_t lo = block_[2 * slot_];
    const std::uint64_t hi = block_[2 * slot_ + 1];
    ++slot_;
    return (hi << 32) | lo;
  }

  /// Standard normal variate (ziggurat).
  real normal() { return normal_(*this); }

  /// Uniform on [0, 1) with 53 random bits.
  real uniform() noexcept { return static_cast<real>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t blocks_used() const noexcept { return block_index_; }

 private:
  void refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_index_),
                                  static_cast<std::uint32_t>(block_index_ >> 32), hi_[0], hi_[1]};
    block_ = Philox4x32::apply(ctr, key_);
    ++block_index_;
    slot_ = 0;
  }

  Philox4x32::Key key_;
  std::array<std::uint32_t, 2> hi_;
  Philox4x32::Counter block_{};
  std::uint64_t block_index_ = 0;
  int slot_ = 2;
  boost::random::normal_distribution<real> normal_;
};

/// Derives a child seed from (seed, index); used to give sweep points fresh,
/// mutually independent seed sets.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(index >> 32), 0x5eedu, 0xc0ffeeu};
  const auto out = Philox4x32::apply(
      ctr, {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return (std::uint64_t{out[1]} << 32) | out[0];
}

}  // namespace hedgeff
