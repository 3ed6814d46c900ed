#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace npg {

/// Philox4x32-10 block function: encrypts a 128-bit counter under a 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/**
 * Counter-based random stream.
 *
 * The draw sequence is a pure function of (seed, stream_id): the seed is the
 * Philox key, the stream id occupies the upper half of the counter and the
 * lower half counts blocks. Two streams never share a counter, so rollouts
 * keyed by distinct stream ids can run in any order or on any thread and
 * still produce bit-identical results.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Stream id for sample `index` of outer iteration `iteration`.
  /// Layout: iteration in the upper 24 bits, index in the lower 40 bits.
  static std::uint64_t stream_key(std::uint64_t iteration, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }

  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace npg
