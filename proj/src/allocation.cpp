#include "fq/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fq/error.hpp"
#include "fq/scalar_quantizer.hpp"
#include "fq/special.hpp"
#include "fq/vector_quantizer.hpp"

namespace fq {

namespace {

// Guard against runaway scans; m(n) ~ 2 log n / b stays far below this on any sane grid.
constexpr std::size_t kMaxCriticalDim = 200000000;

std::size_t block_cap(const SpectrumModel& model, std::size_t d) {
  const std::size_t support = model.support();
  if (support == SpectrumModel::kInfinite) return kMaxCriticalDim;
  return std::max<std::size_t>(1, (support + d - 1) / d);
}

double log_block_eigenvalue(const SpectrumModel& model, std::size_t j, std::size_t d) {
  return model.log_eigenvalue((j - 1) * d + 1);
}

}  // namespace

double log_budget_slack(double log_n) { return 1e-12 * std::max(1.0, std::abs(log_n)); }

double block_eigenvalue(const SpectrumModel& model, std::size_t j, std::size_t d) {
  require(j >= 1 && d >= 1, "block_eigenvalue: indices are 1-based and d >= 1");
  return model.eigenvalue((j - 1) * d + 1);
}

double a_k(const SpectrumModel& model, std::size_t k, std::size_t d) {
  require(k >= 1, "a_k: k must be positive");
  require(d >= 1, "a_k: block dimension must be positive");
  require(k <= block_cap(model, d), "a_k: k exceeds the number of nonzero blocks");
  const double last = log_block_eigenvalue(model, k, d);
  CompensatedSum s;
  for (std::size_t j = 1; j <= k; ++j) s.add(log_block_eigenvalue(model, j, d) - last);
  return 0.5 * static_cast<double>(d) * s.value();
}

std::size_t critical_dim(const SpectrumModel& model, double log_n, std::size_t d) {
  require(log_n >= 0.0 && std::isfinite(log_n), "critical_dim: log n must be finite and nonnegative");
  require(d >= 1, "critical_dim: block dimension must be positive");
  const double limit = log_n + log_budget_slack(log_n);
  const std::size_t cap = block_cap(model, d);
  const double half_d = 0.5 * static_cast<double>(d);

  // a_{k+1} = (d/2)(S_{k+1} - (k+1) log nu_{k+1}) with a running prefix sum S.
  CompensatedSum prefix;
  prefix.add(log_block_eigenvalue(model, 1, d));
  std::size_t m = 1;
  while (m < cap) {
    const double next = log_block_eigenvalue(model, m + 1, d);
    CompensatedSum trial = prefix;
    trial.add(next);
    const double a_next = half_d * (trial.value() - static_cast<double>(m + 1) * next);
    if (a_next > limit) break;
    prefix = trial;
    ++m;
  }
  if (m == kMaxCriticalDim) fail(Errc::internal, "critical_dim: scan limit reached");
  return m;
}

double ProductPlan::log_levels_sum() const {
  CompensatedSum s;
  for (double v : log_levels) s.add(v);
  return s.value();
}

ProductPlan allocate(const SpectrumModel& model, double log_n, std::size_t d) {
  ProductPlan plan;
  plan.log_n = log_n;
  plan.block_dim = d;
  plan.m = critical_dim(model, log_n, d);
  const std::size_t m = plan.m;
  const double half_d = 0.5 * static_cast<double>(d);

  std::vector<double> lognu(m);
  CompensatedSum total;
  for (std::size_t j = 1; j <= m; ++j) {
    lognu[j - 1] = log_block_eigenvalue(model, j, d);
    total.add(lognu[j - 1]);
  }
  const double mean = total.value() / static_cast<double>(m);

  // floor of exp(x_j); an x_j within rounding of log of an integer is snapped to that integer.
  std::vector<double> count(m);
  std::vector<bool> snapped(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = log_n / static_cast<double>(m) + half_d * (lognu[j] - mean);
    if (x > kMaxMaterializedLog) {
      count[j] = std::floor(std::exp(x));  // only the log survives below
      continue;
    }
    const double v = std::exp(x);
    const double r = std::round(v);
    if (r >= 1.0 && r > v && (r - v) <= 1e-9 * r) {
      count[j] = r;
      snapped[j] = true;
    } else {
      count[j] = std::floor(v);
    }
  }
  if (*std::min_element(count.begin(), count.end()) < 1.0)
    fail(Errc::internal, "allocate: a block received fewer than one level");

  plan.log_levels.resize(m);
  for (std::size_t j = 0; j < m; ++j) plan.log_levels[j] = std::log(count[j]);
  // Snapping may only be kept while the budget still holds; undo it from the smallest levels up.
  const double budget = log_n + log_budget_slack(log_n);
  double used = plan.log_levels_sum();
  for (std::size_t j = m; j-- > 0 && used > budget;) {
    if (!snapped[j]) continue;
    count[j] -= 1.0;
    plan.log_levels[j] = std::log(count[j]);
    used = plan.log_levels_sum();
  }
  if (used > budget) fail(Errc::internal, "allocate: budget exceeded");

  plan.block_eigs.resize(m);
  for (std::size_t j = 1; j <= m; ++j) plan.block_eigs[j - 1] = block_eigenvalue(model, j, d);

  plan.materializable = std::all_of(plan.log_levels.begin(), plan.log_levels.end(),
                                    [](double v) { return v <= kMaxMaterializedLog; });
  if (plan.materializable) {
    plan.levels.resize(m);
    for (std::size_t j = 0; j < m; ++j) plan.levels[j] = static_cast<std::uint64_t>(count[j]);
  }
  return plan;
}

PlanDistortion plan_distortion(const ProductPlan& plan, const SpectrumModel& model,
                               const PlanDistortionOptions& options) {
  if (!plan.materializable) fail(Errc::not_materializable, "plan_distortion: level counts exceed the exact integer range");
  const std::size_t d = plan.block_dim;
  PlanDistortion out;
  out.tail = model.tail_sum(plan.m * d);

  // Blocks sharing a level count share one quantizer.
  std::map<std::uint64_t, double> weight;
  for (std::size_t j = 0; j < plan.m; ++j) weight[plan.levels[j]] += plan.block_eigs[j];

  CompensatedSum quant;
  double var = 0.0;
  if (d == 1) {
    if (weight.rbegin()->first > kMaxScalarLevels)
      fail(Errc::not_materializable, "plan_distortion: " + std::to_string(weight.rbegin()->first) +
                                         " levels exceed the exact scalar range (" + std::to_string(kMaxScalarLevels) + ")");
    for (const auto& [k, w] : weight) quant.add(w * ScalarQuantizerCache::global().distortion(k));
  } else {
    out.exact = false;
    VqOptions vq;
    vq.eval_samples = options.vq_eval_samples;
    vq.polish_batch = std::max(options.vq_train_samples, vq.polish_batch);
    for (const auto& [k, w] : weight) {
      if (k == 1) {
        quant.add(w * static_cast<double>(d));  // e_1(N(0, I_d))^2 = d
        continue;
      }
      vq.batch = std::max(vq.batch, 4 * k);
      vq.polish_batch = std::max(vq.polish_batch, 4 * k);
      const VectorQuantizer q = train_vq(d, k, options.seed + k, vq);
      quant.add(w * q.distortion_estimate.value);
      var += w * w * q.distortion_estimate.std_error * q.distortion_estimate.std_error;
    }
  }
  out.quant = quant.value();
  out.std_error = std::sqrt(var);
  out.total = out.tail + out.quant;
  return out;
}

double product_upper_bound(const SpectrumModel& model, double log_n, std::size_t d, double cd) {
  require(cd > 0.0, "product_upper_bound: C(d) must be positive");
  const std::size_t m = critical_dim(model, log_n, d);
  const double nu_m = block_eigenvalue(model, m, d);
  return model.tail_sum(m * d) + std::pow(4.0, 1.0 / static_cast<double>(d)) * cd * static_cast<double>(m) * nu_m;
}

double spectral_lower_bound(const SpectrumModel& model, double log_n) {
  const std::size_t m = critical_dim(model, log_n, 1);
  return model.tail_sum(m) + static_cast<double>(m) * model.eigenvalue(m + 1);
}

ContinuousAllocation continuous_allocation(const SpectrumModel& model, double log_n, std::size_t m) {
  require(m >= 1, "continuous_allocation: m must be positive");
  require(m <= model.support(), "continuous_allocation: m exceeds the support");
  std::vector<double> lg(m);
  CompensatedSum s;
  for (std::size_t j = 1; j <= m; ++j) {
    lg[j - 1] = model.log_eigenvalue(j);
    s.add(lg[j - 1]);
  }
  const double mean = s.value() / static_cast<double>(m);
  ContinuousAllocation out;
  out.log_z.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.log_z[j] = log_n / static_cast<double>(m) + 0.5 * (lg[j] - mean);
  out.value = static_cast<double>(m) * std::exp(-2.0 * log_n / static_cast<double>(m) + mean);
  return out;
}

}  // namespace fq
