#include "fq/vector_quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fq/error.hpp"
#include "fq/kernels.hpp"
#include "fq/rng.hpp"
#include "fq/special.hpp"

namespace fq {

namespace {

// Stream ids separating the roles of random draws under one seed.
constexpr std::uint64_t kTrainStream = 0x7452;
constexpr std::uint64_t kSelectStream = 0x5345;
constexpr std::uint64_t kEvalStream = 0x4556;
constexpr std::size_t kEvalBlock = 1 << 16;

std::vector<double> draw(const CounterStream& stream, std::size_t first_point, std::size_t count, std::size_t dim) {
  std::vector<double> pts(count * dim);
  stream.fill_normal(first_point * dim, pts);
  return pts;
}

// k-means++ seeding: first centre uniform, then proportional to squared distance.
std::vector<double> seed_plus_plus(std::span<const double> pts, std::size_t dim, std::size_t k,
                                   const CounterStream& pick) {
  const std::size_t n = pts.size() / dim;
  std::vector<double> centres;
  centres.reserve(k * dim);
  auto take = [&](std::size_t i) { centres.insert(centres.end(), pts.begin() + i * dim, pts.begin() + (i + 1) * dim); };
  take(std::min<std::size_t>(static_cast<std::size_t>(pick.uniform(0) * n), n - 1));

  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    const double* last = centres.data() + (c - 1) * dim;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t t = 0; t < dim; ++t) {
        const double diff = pts[i * dim + t] - last[t];
        acc += diff * diff;
      }
      best[i] = std::min(best[i], acc);
      total += best[i];
    }
    double target = pick.uniform(c) * total;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= best[i];
      if (target <= 0.0 && best[i] > 0.0) {
        chosen = i;
        break;
      }
    }
    take(chosen);
  }
  return centres;
}

// One Lloyd step on a batch. Returns the number of empty cells that had to be reseeded.
std::size_t lloyd_step(std::span<const double> pts, std::size_t dim, std::vector<double>& centres) {
  const std::size_t n = pts.size() / dim;
  const std::size_t k = centres.size() / dim;
  std::vector<std::uint32_t> idx(n);
  std::vector<double> dist(n);
  kernels::nearest_centroid(pts, dim, centres, idx, dist);

  std::vector<double> sum(k * dim, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++count[idx[i]];
    for (std::size_t t = 0; t < dim; ++t) sum[idx[i] * dim + t] += pts[i * dim + t];
  }
  std::size_t reseeds = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (count[c] == 0) {
      // Dead cell: move it onto the batch point worst served by its current centre.
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      std::copy_n(pts.begin() + far * dim, dim, centres.begin() + c * dim);
      dist[far] = 0.0;
      ++reseeds;
      continue;
    }
    for (std::size_t t = 0; t < dim; ++t) centres[c * dim + t] = sum[c * dim + t] / static_cast<double>(count[c]);
  }
  return reseeds;
}

double mean_sq_dist(std::span<const double> pts, std::size_t dim, std::span<const double> centres) {
  const std::size_t n = pts.size() / dim;
  std::vector<std::uint32_t> idx(n);
  std::vector<double> dist(n);
  kernels::nearest_centroid(pts, dim, centres, idx, dist);
  return compensated_sum(dist) / static_cast<double>(n);
}

}  // namespace

EstimateCI summarize(std::span<const double> values, std::uint64_t seed) {
  require(!values.empty(), "summarize: no samples");
  const double n = static_cast<double>(values.size());
  const double mean = compensated_sum(values) / n;
  CompensatedSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  const double var = values.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), values.size(), seed};
}

EstimateCI evaluate_codebook(std::span<const double> codepoints, std::size_t dim, std::size_t samples,
                             std::uint64_t seed) {
  require(dim >= 1 && !codepoints.empty() && codepoints.size() % dim == 0, "evaluate_codebook: bad codebook shape");
  require(samples >= 2, "evaluate_codebook: need at least two samples");
  const CounterStream stream(seed, kEvalStream);
  std::vector<double> all(samples);
  for (std::size_t first = 0; first < samples; first += kEvalBlock) {
    const std::size_t count = std::min(kEvalBlock, samples - first);
    const auto pts = draw(stream, first, count, dim);
    std::vector<std::uint32_t> idx(count);
    kernels::nearest_centroid(pts, dim, codepoints, idx, std::span<double>(all).subspan(first, count));
  }
  return summarize(all, seed);
}

VectorQuantizer train_vq(std::size_t dim, std::size_t levels, std::uint64_t seed, const VqOptions& options) {
  require(dim >= 1, "train_vq: dimension must be positive");
  require(levels >= 1, "train_vq: level count must be positive");
  require(levels <= (1u << 20), "train_vq: level count too large");
  require(options.restarts >= 1 && options.iterations >= 1, "train_vq: need at least one restart and iteration");
  require(options.batch >= 2 * levels && options.polish_batch >= 2 * levels,
          "train_vq: training batches must hold at least two points per level");

  const std::size_t limit = options.dead_cell_limit ? options.dead_cell_limit : 4 * levels;
  const CounterStream train(seed, kTrainStream);
  const auto selection = draw(CounterStream(seed, kSelectStream), 0, options.selection_samples, dim);

  VectorQuantizer out;
  out.dim = dim;
  out.levels = levels;
  out.training_seed = seed;
  double best_score = std::numeric_limits<double>::infinity();

  // Restarts are independent given their derived streams; the winner is chosen by index order on ties.
  for (std::size_t r = 0; r < options.restarts; ++r) {
    const CounterStream rs = train.derive(r);
    const auto init = draw(rs.derive(0), 0, options.batch, dim);
    std::vector<double> centres = seed_plus_plus(init, dim, levels, rs.derive(1));
    std::size_t reseeds = 0;
    const std::size_t total = options.iterations + options.polish_iterations;
    for (std::size_t it = 0; it < total; ++it) {
      const std::size_t n = it < options.iterations ? options.batch : options.polish_batch;
      const auto batch = draw(rs.derive(2 + it), 0, n, dim);
      reseeds += lloyd_step(batch, dim, centres);
    }
    const double score = mean_sq_dist(selection, dim, centres);
    if (score < best_score) {
      best_score = score;
      out.codepoints = std::move(centres);
      out.dead_cell_reseeds = reseeds;
      out.best_restart = r;
    }
  }
  out.dead_cell_flag = out.dead_cell_reseeds > limit;
  out.distortion_estimate = evaluate_codebook(out.codepoints, dim, options.eval_samples, seed);
  return out;
}

std::vector<CdRow> estimate_cd(std::size_t dim, std::size_t k_max, std::uint64_t seed, const VqOptions& options) {
  require(dim >= 1 && dim <= 4, "estimate_cd: dimension must lie in 1..4");
  require(k_max >= 1, "estimate_cd: k_max must be positive");
  std::vector<CdRow> rows;
  double sup = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const VectorQuantizer vq = train_vq(dim, k, seed + k, options);
    const double scale = std::pow(static_cast<double>(k), 2.0 / static_cast<double>(dim));
    CdRow row;
    row.k = k;
    row.scaled = scale * vq.distortion_estimate.value;
    row.std_error = scale * vq.distortion_estimate.std_error;
    sup = std::max(sup, row.scaled);
    row.running_sup = sup;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fq
