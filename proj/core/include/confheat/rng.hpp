#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace confheat {

/// Philox4x32-10 block function (Salmon et al.). Maps a 128-bit counter and a
/// 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Domain tags keep substreams of different operations apart.
enum class StreamTag : std::uint32_t {
  kPoisson = 1,
  kDiffuse = 2,
  kPath = 3,
  kBridge = 4,
  kGenerator = 5,
  kAuxiliary = 6,
};

/// Counter-based random stream keyed by (seed, a, b, tag). Two streams with
/// different keys are independent; the same key always reproduces the same
/// sequence regardless of which thread draws from it.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, std::uint32_t a, std::uint32_t b, StreamTag tag) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal via Box-Muller (pairs cached).
  double normal() noexcept;
  /// Poisson(mean) by sequential-search inversion; large means are split into
  /// chunks of at most 32 (Poisson laws add).
  std::uint64_t poisson(double mean) noexcept;

  /// Reposition to the given block; subsequent draws start there.
  void seek(std::uint32_t block) noexcept;

 private:
  std::uint64_t next_u64() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Independent child seed, e.g. for the second leg of a two-step diffusion.
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t index) noexcept;

}  // namespace confheat
