#include <cstdlib>
#include <cstring>

#include "fq/error.hpp"
#include "fq/kernels.hpp"

namespace fq::kernels {

#ifndef FQ_HAVE_AVX2
namespace avx2 {
// Stubs so the symbols exist on builds without the AVX2 translation unit; never selected.
void nearest_centroid(std::span<const double>, std::size_t, std::span<const double>,
                      std::span<std::uint32_t>, std::span<double>) {
  fail(Errc::internal, "AVX2 kernels not compiled in");
}
void weighted_sq_rows(std::span<const double>, std::span<const double>, std::span<double>) {
  fail(Errc::internal, "AVX2 kernels not compiled in");
}
}  // namespace avx2
#endif

const char* to_string(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool available(Isa isa) noexcept {
  if (isa == Isa::scalar) return true;
#if defined(FQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active() noexcept {
  static const Isa chosen = [] {
    const char* env = std::getenv("FQ_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::scalar;
    return available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  }();
  return chosen;
}

void nearest_centroid(std::span<const double> points, std::size_t dim,
                      std::span<const double> centroids, std::span<std::uint32_t> index,
                      std::span<double> sq_dist, Isa isa) {
  require(dim > 0 && points.size() % dim == 0 && centroids.size() % dim == 0 && !centroids.empty(),
          "nearest_centroid: inconsistent shapes");
  require(index.size() == points.size() / dim && sq_dist.size() == index.size(),
          "nearest_centroid: output size mismatch");
  if (isa == Isa::avx2 && available(Isa::avx2)) {
    avx2::nearest_centroid(points, dim, centroids, index, sq_dist);
  } else {
    scalar::nearest_centroid(points, dim, centroids, index, sq_dist);
  }
}

void weighted_sq_rows(std::span<const double> weights, std::span<const double> x,
                      std::span<double> out, Isa isa) {
  require(x.size() == weights.size() * out.size(), "weighted_sq_rows: shape mismatch");
  if (isa == Isa::avx2 && available(Isa::avx2)) {
    avx2::weighted_sq_rows(weights, x, out);
  } else {
    scalar::weighted_sq_rows(weights, x, out);
  }
}

}  // namespace fq::kernels
