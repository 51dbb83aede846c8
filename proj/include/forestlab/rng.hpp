#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace forestlab {

/// Philox4x32-10 block function from the Random123 family. Maps a 128-bit
/// counter and 64-bit key to 128 bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The pair (seed, stream_id) names the stream;
/// the draw index is the only state, so any stream can be reconstructed and
/// replicas on distinct stream ids never share a block.
///
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }

  /// Independent stream derived from this one's identity (not its position).
  RngStream substream(std::uint64_t index) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t draws() const noexcept { return block_ * 2 - (2 - used_); }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned used_ = 2;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace forestlab
