#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fq {

/// Philox4x32-10 block function: a keyed bijection on 128-bit counters.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Random-access stream of uniforms and standard normals addressed by (seed, stream, index).
///
/// Nothing is carried between draws, so any block of indices can be produced
/// independently and in any order; this is what keeps the Monte Carlo
/// reductions bit-stable regardless of how work is split.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const noexcept;
  /// Standard normal by inverse-CDF transform of uniform(index).
  double normal(std::uint64_t index) const;

  void fill_uniform(std::uint64_t first, std::span<double> out) const noexcept;
  void fill_normal(std::uint64_t first, std::span<double> out) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Child stream id derived from (stream, tag); distinct tags give unrelated streams.
  CounterStream derive(std::uint64_t tag) const noexcept;

 private:
  std::array<std::uint64_t, 2> block(std::uint64_t block_index) const noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Normal draw from a uniform in (0, 1).
double normal_from_uniform(double u);

}  // namespace fq
