#include <limits>

#include "fq/kernels.hpp"

namespace fq::kernels::scalar {

void nearest_centroid(std::span<const double> points, std::size_t dim,
                      std::span<const double> centroids, std::span<std::uint32_t> index,
                      std::span<double> sq_dist) {
  const std::size_t n = points.size() / dim;
  const std::size_t k = centroids.size() / dim;
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points.data() + i * dim;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double* q = centroids.data() + c * dim;
      double acc = 0.0;
      for (std::size_t t = 0; t < dim; ++t) {
        const double diff = p[t] - q[t];
        acc = acc + diff * diff;
      }
      if (acc < best) {
        best = acc;
        arg = static_cast<std::uint32_t>(c);
      }
    }
    index[i] = arg;
    sq_dist[i] = best;
  }
}

void weighted_sq_rows(std::span<const double> weights, std::span<const double> x,
                      std::span<double> out) {
  const std::size_t cols = weights.size();
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double* row = x.data() + r * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += weights[j] * row[j] * row[j];
    out[r] = acc;
  }
}

}  // namespace fq::kernels::scalar
