#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sumnorm {

/// Counter-based generator (Philox4x32-10).
///
/// The 64-bit seed is the Philox key. The 128-bit counter is split into a
/// 64-bit stream index (high half) and a 64-bit block counter (low half), so
/// two states built from the same seed but different stream indices walk
/// disjoint counter ranges and can never produce overlapping sequences.
/// Each block yields two 64-bit outputs.
///
/// Satisfies std::uniform_random_bit_generator. Not thread-safe: one state
/// per thread, derived with a distinct stream index.
class RngState {
 public:
  using result_type = std::uint64_t;

  explicit RngState(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Independent child stream keyed by (seed, index).
  RngState derive(std::uint64_t index) const noexcept { return RngState(seed_, index); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned buffered_ = 0;
};

namespace detail {
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept;
}  // namespace detail

/// Stateless 64-bit mixer (SplitMix64 finalizer); used to hash seed keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive hash of a seed together with additional key words.
template <typename... Words>
std::uint64_t hash_seed(std::uint64_t seed, Words... words) noexcept {
  std::uint64_t h = mix64(seed);
  ((h = mix64(h ^ (static_cast<std::uint64_t>(words) + 0x9e3779b97f4a7c15ULL))), ...);
  return h;
}

}  // namespace sumnorm
