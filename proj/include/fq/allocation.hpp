#pragma once

// Level allocation for product quantizers over Karhunen-Loeve blocks.
// Budgets enter only through log n (nats), so n may be astronomically large.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fq/spectra.hpp"

namespace fq {

/// Absolute slack used for the a_k <= log n comparison.
double log_budget_slack(double log_n);

/// nu_j = lambda_{(j-1)d+1}, the leading eigenvalue of block j.
double block_eigenvalue(const SpectrumModel& model, std::size_t j, std::size_t d);

/// a_k(d) = (d/2) sum_{j<=k} log(nu_j / nu_k).
double a_k(const SpectrumModel& model, std::size_t k, std::size_t d = 1);

/// m(n, d) = max{k >= 1 : a_k(d) <= log n}, capped by the support of finite-rank models.
std::size_t critical_dim(const SpectrumModel& model, double log_n, std::size_t d = 1);

struct ProductPlan {
  double log_n = 0.0;
  std::size_t block_dim = 1;
  std::size_t m = 0;
  std::vector<double> log_levels;       ///< log n_j, exact integers' logs
  std::vector<std::uint64_t> levels;    ///< n_j; empty unless materializable
  std::vector<double> block_eigs;       ///< nu_j
  bool materializable = false;          ///< every n_j fits a 64-bit integer exactly

  double log_levels_sum() const;
};

/// Largest level count that is represented as an exact integer.
constexpr double kMaxMaterializedLog = 36.0;

/// n_j = floor(n^{1/m} nu_j^{d/2} / (prod_i nu_i)^{d/(2m)}), computed in log space.
ProductPlan allocate(const SpectrumModel& model, double log_n, std::size_t d = 1);

struct PlanDistortionOptions {
  std::size_t vq_train_samples = 200000;
  std::size_t vq_eval_samples = 1000000;
  std::uint64_t seed = 1;
};

struct PlanDistortion {
  double tail = 0.0;    ///< sum_{j >= md+1} lambda_j
  double quant = 0.0;   ///< sum_j nu_j e_{n_j}^2
  double total = 0.0;
  double std_error = 0.0;  ///< Monte Carlo error of `quant` (d >= 2 only)
  bool exact = true;    ///< false for block quantizers trained on samples (an upper estimate)
};

PlanDistortion plan_distortion(const ProductPlan& plan, const SpectrumModel& model,
                               const PlanDistortionOptions& options = {});

/// tail(md) + 4^{1/d} C(d) m nu_m.
double product_upper_bound(const SpectrumModel& model, double log_n, std::size_t d, double cd);

/// tail(m) + m lambda_{m+1} with m = m(n, 1).
double spectral_lower_bound(const SpectrumModel& model, double log_n);

struct ContinuousAllocation {
  std::vector<double> log_z;  ///< real-valued optimal level counts
  double value = 0.0;         ///< sum_j lambda_j z_j^{-2}
};

/// Minimiser of sum_{j<=m} lambda_j z_j^{-2} subject to prod z_j = n.
ContinuousAllocation continuous_allocation(const SpectrumModel& model, double log_n, std::size_t m);

}  // namespace fq
