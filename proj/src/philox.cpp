#include "cwstein/philox.hpp"

#include <cmath>

namespace cwstein {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
}  // namespace

PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  const std::uint64_t m = bits & ((std::uint64_t{1} << 53) - 1);
  return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t block)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream),
      block_(block) {}

void CounterStream::refill() {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32),
                          static_cast<std::uint32_t>(stream_),
                          static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = philox4x32(ctr, key_);
  ++block_;
  used_ = 0;
}

CounterStream::result_type CounterStream::operator()() {
  if (used_ >= 4) refill();
  return buffer_[used_++];
}

double CounterStream::uniform() {
  const std::uint32_t hi = (*this)();
  const std::uint32_t lo = (*this)();
  return to_open_unit(hi, lo);
}

double CounterStream::normal() {
  if (have_normal_) {
    have_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 6.283185307179586 * u2;
  spare_normal_ = r * std::sin(t);
  have_normal_ = true;
  return r * std::cos(t);
}

void CounterStream::seek(std::uint64_t block) {
  block_ = block;
  used_ = 4;
  have_normal_ = false;
}

}  // namespace cwstein
