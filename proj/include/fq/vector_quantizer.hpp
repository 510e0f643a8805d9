#pragma once

// Trained k-level quantizers for the d-dimensional standard normal N(0, I_d).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fq {

struct EstimateCI {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  double lo(double z) const { return value - z * std_error; }
  double hi(double z) const { return value + z * std_error; }
  bool covers(double x, double z) const { return lo(z) <= x && x <= hi(z); }
};

/// Mean and standard error of a sample, accumulated in a fixed order.
EstimateCI summarize(std::span<const double> values, std::uint64_t seed);

struct VqOptions {
  std::size_t batch = 20000;            ///< fresh draws per Lloyd iteration
  std::size_t iterations = 40;
  std::size_t polish_batch = 200000;    ///< larger fresh batches for the final iterations
  std::size_t polish_iterations = 3;
  std::size_t restarts = 8;
  std::size_t selection_samples = 100000;  ///< shared sample used to pick the best restart
  std::size_t eval_samples = 1000000;      ///< independent sample for the reported estimate
  std::size_t dead_cell_limit = 0;         ///< reseeds tolerated before flagging; 0 means 4k
};

struct VectorQuantizer {
  std::size_t dim = 0;
  std::size_t levels = 0;
  std::vector<double> codepoints;  ///< levels x dim, row-major
  EstimateCI distortion_estimate;
  std::uint64_t training_seed = 0;
  std::size_t dead_cell_reseeds = 0;
  bool dead_cell_flag = false;     ///< reseeds exceeded the limit
  std::size_t best_restart = 0;
};

VectorQuantizer train_vq(std::size_t dim, std::size_t levels, std::uint64_t seed, const VqOptions& options = {});

/// E min_i |Z - c_i|^2 over `samples` fresh draws.
EstimateCI evaluate_codebook(std::span<const double> codepoints, std::size_t dim, std::size_t samples,
                             std::uint64_t seed);

struct CdRow {
  std::size_t k = 0;
  double scaled = 0.0;      ///< k^{2/d} e_k^2 estimate
  double std_error = 0.0;
  double running_sup = 0.0;
};

std::vector<CdRow> estimate_cd(std::size_t dim, std::size_t k_max, std::uint64_t seed, const VqOptions& options = {});

}  // namespace fq
