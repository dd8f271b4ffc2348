#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace mledist {

/// Philox4x32-10 block function. Maps a 128-bit counter and a 64-bit key to
/// 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Reproducible random stream keyed by (seed, stream_id).
///
/// Counter-based: the i-th 64-bit output depends only on (seed, stream_id, i),
/// so results do not depend on how streams are distributed over threads.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  /// Standard exponential.
  double exponential() noexcept;
  /// Standard normal.
  double normal();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int next_ = 2;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Mixes a seed with a tag into a new 64-bit seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

}  // namespace mledist
