#pragma once

#include <array>
#include <cstdint>

namespace pbsrdd {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A stream is identified by (seed, stream id); the block counter walks
/// through the stream, so any replicate can be regenerated independently.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream_id);

  static Block bijection(Block counter, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  /// Uniform double in the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Exponential variate with the given rate (> 0).
  double exponential(double rate);

  /// Integer uniformly distributed on [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  Key key_;
  std::uint64_t block_ = 0;
  std::uint64_t stream_;
  Block buffer_{};
  int used_ = 4;
};

}  // namespace pbsrdd
