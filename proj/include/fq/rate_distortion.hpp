#pragma once

// Reverse water-filling for the Gaussian epsilon-entropy R(eps) (nats).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fq/scalar_quantizer.hpp"
#include "fq/spectra.hpp"

namespace fq {

struct WaterfillSolution {
  double eps = 0.0;
  double eps_sq = 0.0;
  bool zero_rate = false;  ///< eps >= e_1: no coordinate is coded, r undefined (reported as 0)
  std::size_t r = 0;
  double theta = 0.0;      ///< water level, in [lambda_{r+1}, lambda_r]
  double R = 0.0;
  double tail_r = 0.0;     ///< sum_{j > r} lambda_j
  double tail_bound = 0.0; ///< error bound carried over from the tail sum
};

/// Water-filling at distortion eps^2, given directly (avoids a square root round trip).
WaterfillSolution waterfill_sq(const SpectrumModel& model, double eps_sq);
WaterfillSolution waterfill(const SpectrumModel& model, double eps);

/// Inverse of R(eps) by monotone bisection on log eps.
double distortion_rate(const SpectrumModel& model, double rate);

/// Small-eps form (b/2) (cb/(b-1) ((b-1)/2)^a)^{1/(b-1)} eps^{-2/(b-1)} log(1/eps)^{-a/(b-1)}.
double rd_asymptotic(double c, double b, double a, double eps);

struct ReproducingSample {
  std::size_t r = 0;
  std::size_t count = 0;
  double theta = 0.0;
  double tail_r = 0.0;
  std::vector<double> x;  ///< count x r, lambda_j^{1/2} Z_j
  std::vector<double> y;  ///< count x r, reproducing coordinates
};

/// Joint draws of the source coordinates and the optimal reproducing coordinates (j <= r).
ReproducingSample sample_reproducing(const SpectrumModel& model, double eps, std::size_t count, std::uint64_t seed);

struct NepsBracket {
  double log_lower = 0.0;      ///< R(eps)
  double log_upper = 0.0;      ///< log of the smallest plan budget found with distortion <= eps^2
  bool upper_materialized = true;  ///< false: log_upper is an estimate from the product upper bound, no plan built
  std::uint64_t n_upper = 0;   ///< the budget itself when it fits an integer
};

/// Largest scalar level count the bracket search will build exactly.
constexpr std::uint64_t kDeskScaleLevels = kMaxScalarLevels;

NepsBracket n_eps_bracket(const SpectrumModel& model, double eps);

}  // namespace fq
