#include <immintrin.h>

#include <limits>
#include <vector>

#include "fq/kernels.hpp"

namespace fq::kernels::avx2 {

void nearest_centroid(std::span<const double> points, std::size_t dim,
                      std::span<const double> centroids, std::span<std::uint32_t> index,
                      std::span<double> sq_dist) {
  const std::size_t n = points.size() / dim;
  const std::size_t k = centroids.size() / dim;
  const std::size_t k4 = (k + 3) / 4 * 4;

  // Dimension-major copy of the codebook; padding lanes are NaN so they never win a comparison.
  std::vector<double> soa(dim * k4, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t t = 0; t < dim; ++t) soa[t * k4 + c] = centroids[c * dim + t];

  const __m256d step = _mm256_set1_pd(4.0);
  const __m256d lane_ids = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  alignas(32) double lane_best[4];
  alignas(32) double lane_arg[4];

  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points.data() + i * dim;
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d arg = _mm256_setzero_pd();
    __m256d ids = lane_ids;
    for (std::size_t g = 0; g < k4; g += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t t = 0; t < dim; ++t) {
        const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(p[t]), _mm256_loadu_pd(&soa[t * k4 + g]));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
      }
      const __m256d better = _mm256_cmp_pd(acc, best, _CMP_LT_OQ);
      best = _mm256_blendv_pd(best, acc, better);
      arg = _mm256_blendv_pd(arg, ids, better);
      ids = _mm256_add_pd(ids, step);
    }
    _mm256_store_pd(lane_best, best);
    _mm256_store_pd(lane_arg, arg);
    double d = lane_best[0];
    double a = lane_arg[0];
    for (int l = 1; l < 4; ++l) {
      if (lane_best[l] < d || (lane_best[l] == d && lane_arg[l] < a)) {
        d = lane_best[l];
        a = lane_arg[l];
      }
    }
    index[i] = static_cast<std::uint32_t>(a);
    sq_dist[i] = d;
  }
}

void weighted_sq_rows(std::span<const double> weights, std::span<const double> x,
                      std::span<double> out) {
  const std::size_t cols = weights.size();
  const std::size_t body = cols / 4 * 4;
  alignas(32) double lanes[4];
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double* row = x.data() + r * cols;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < body; j += 4) {
      const __m256d v = _mm256_loadu_pd(row + j);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(weights.data() + j), _mm256_mul_pd(v, v)));
    }
    _mm256_store_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (std::size_t j = body; j < cols; ++j) sum += weights[j] * row[j] * row[j];
    out[r] = sum;
  }
}

}  // namespace fq::kernels::avx2
