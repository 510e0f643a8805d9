#include "fq/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include "fq/normal.hpp"

namespace fq {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t splitmix(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint64_t, 2> CounterStream::block(std::uint64_t b) const noexcept {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double CounterStream::uniform(std::uint64_t index) const noexcept {
  return to_open_unit(block(index >> 1)[index & 1]);
}

double normal_from_uniform(double u) { return -normal::kSqrt2 * boost::math::erfc_inv(2.0 * u); }

double CounterStream::normal(std::uint64_t index) const { return normal_from_uniform(uniform(index)); }

void CounterStream::fill_uniform(std::uint64_t first, std::span<double> out) const noexcept {
  std::size_t i = 0;
  std::uint64_t index = first;
  if ((index & 1) && i < out.size()) {
    out[i++] = uniform(index++);
  }
  for (; i + 1 < out.size(); i += 2, index += 2) {
    const auto bits = block(index >> 1);
    out[i] = to_open_unit(bits[0]);
    out[i + 1] = to_open_unit(bits[1]);
  }
  if (i < out.size()) out[i] = uniform(index);
}

void CounterStream::fill_normal(std::uint64_t first, std::span<double> out) const {
  fill_uniform(first, out);
  for (double& v : out) v = normal_from_uniform(v);
}

CounterStream CounterStream::derive(std::uint64_t tag) const noexcept {
  return CounterStream(seed_, splitmix(stream_ ^ splitmix(tag + 0x632BE59BD9B4E019ull)));
}

}  // namespace fq
