#pragma once

// Path sampling through truncated Karhunen-Loeve expansions, empirical plan
// distortion and small-ball probabilities.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fq/allocation.hpp"
#include "fq/spectra.hpp"
#include "fq/vector_quantizer.hpp"

namespace fq {

/// Smallest J with tail(J) <= budget, or throws Errc::bias_budget past j_max.
std::size_t truncation_for_budget(const SpectrumModel& model, double budget, std::size_t j_max = 10000000);

struct PathSampleBatch {
  std::size_t truncation = 0;
  std::size_t count = 0;
  std::vector<double> coefficients;  ///< count x J, lambda_j^{1/2} Z_j
  std::uint64_t seed = 0;
  double truncation_bias = 0.0;      ///< tail(J), the energy left out of every row
};

/// Draws `count` truncated paths. bias_budget <= 0 selects 1e-6 * trace.
PathSampleBatch sample_paths(const SpectrumModel& model, std::size_t truncation, std::size_t count, std::uint64_t seed,
                             double bias_budget = 0.0);

/// E|X - f(X)|^2 for a materialised plan over a stored batch; the tail beyond J is added exactly.
EstimateCI empirical_distortion(const ProductPlan& plan, const SpectrumModel& model, const PathSampleBatch& batch);

/// Streaming variant: coordinates up to `truncation` are drawn block by block, never stored.
EstimateCI empirical_distortion(const ProductPlan& plan, const SpectrumModel& model, std::size_t truncation,
                                std::size_t count, std::uint64_t seed);

struct SmallBallEstimate {
  double eps = 0.0;
  double probability = 0.0;
  double F = 0.0;           ///< -log P
  double std_error = 0.0;   ///< delta-method error of F
  std::size_t hits = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t truncation = 0;
  double truncation_bias = 0.0;  ///< tail(J); truncation makes P too large and F too small
};

SmallBallEstimate small_ball(const SpectrumModel& model, double eps, std::size_t truncation, std::size_t count,
                             std::uint64_t seed);

}  // namespace fq
