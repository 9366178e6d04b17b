#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cwstein {

// Philox4x32-10 block function.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

// Uniform in the open interval (0, 1) from 32 random bits pairs (53-bit).
double to_open_unit(std::uint32_t hi, std::uint32_t lo);

// Counter-based stream keyed by (seed, stream id). Position is a 64-bit block
// index, so any draw can be reproduced without replaying the stream.
class CounterStream {
 public:
  using result_type = std::uint32_t;

  CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t block = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();  // open (0, 1)
  double normal();   // Box-Muller, both outputs used

  void seek(std::uint64_t block);
  std::uint64_t block() const { return block_; }

 private:
  void refill();

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_;
  PhiloxCounter buffer_{};
  int used_ = 4;
  bool have_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace cwstein
