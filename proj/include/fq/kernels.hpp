#pragma once

// Data-parallel inner loops with a portable scalar reference and an AVX2
// variant chosen at runtime. Set FQ_KERNELS=scalar to force the reference.
//
// nearest_centroid is bit-identical across variants (same per-centroid
// operation order, no fused multiply-add); weighted_sq_rows reassociates the
// row sum and agrees with the reference to rounding.

#include <cstddef>
#include <cstdint>
#include <span>

namespace fq::kernels {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa) noexcept;
bool available(Isa isa) noexcept;
/// Best available variant, honouring the FQ_KERNELS override. Fixed after first call.
Isa active() noexcept;

/// For each row of `points` (n x dim, row-major) find the nearest row of
/// `centroids` (k x dim, row-major) in squared Euclidean distance. Ties go to
/// the lowest centroid index.
void nearest_centroid(std::span<const double> points, std::size_t dim,
                      std::span<const double> centroids, std::span<std::uint32_t> index,
                      std::span<double> sq_dist, Isa isa = active());

/// out[r] = sum_j weights[j] * x[r * J + j]^2 with J = weights.size().
void weighted_sq_rows(std::span<const double> weights, std::span<const double> x,
                      std::span<double> out, Isa isa = active());

namespace scalar {
void nearest_centroid(std::span<const double> points, std::size_t dim,
                      std::span<const double> centroids, std::span<std::uint32_t> index,
                      std::span<double> sq_dist);
void weighted_sq_rows(std::span<const double> weights, std::span<const double> x,
                      std::span<double> out);
}  // namespace scalar

namespace avx2 {
void nearest_centroid(std::span<const double> points, std::size_t dim,
                      std::span<const double> centroids, std::span<std::uint32_t> index,
                      std::span<double> sq_dist);
void weighted_sq_rows(std::span<const double> weights, std::span<const double> x,
                      std::span<double> out);
}  // namespace avx2

}  // namespace fq::kernels
