#include "fq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <sstream>

#include "fq/error.hpp"
#include "fq/kernels.hpp"
#include "fq/rng.hpp"
#include "fq/scalar_quantizer.hpp"

namespace fq {

namespace {

constexpr std::uint64_t kPathStream = 0x5041;
constexpr std::size_t kRowBlock = 4096;
constexpr std::size_t kMaxStoredValues = 50000000;
constexpr std::size_t kMinHits = 50;

// Per-block quantizer of a plan, looked up by level count.
class PlanQuantizers {
 public:
  PlanQuantizers(const ProductPlan& plan, std::uint64_t seed) : plan_(plan) {
    if (!plan.materializable) fail(Errc::not_materializable, "plan levels exceed the exact integer range");
    for (std::uint64_t k : plan.levels) {
      if (plan.block_dim == 1) {
        if (!scalar_.count(k)) scalar_[k] = ScalarQuantizerCache::global().quantizer(k);
      } else if (k > 1 && !vector_.count(k)) {
        VqOptions opt;
        opt.eval_samples = 2;
        opt.batch = std::max(opt.batch, 4 * k);
        opt.polish_batch = std::max(opt.polish_batch, 4 * k);
        vector_[k] = train_vq(plan.block_dim, k, seed + k, opt).codepoints;
      }
    }
    for (std::uint64_t k : plan.levels) {
      if (plan.block_dim == 1) {
        by_block_scalar_.push_back(scalar_.at(k).get());
      } else {
        by_block_vector_.push_back(k > 1 ? &vector_.at(k) : nullptr);
      }
    }
  }

  // Squared error of the quantised coordinates 1..md of one row of standard normals, eigenvalue weighted.
  double row_error(const double* z, const SpectrumModel& model, const std::vector<double>& lambda) const {
    const std::size_t d = plan_.block_dim;
    double err = 0.0;
    if (d == 1) {
      for (std::size_t j = 0; j < plan_.m; ++j) {
        const double diff = z[j] - by_block_scalar_[j]->quantize(z[j]);
        err += lambda[j] * diff * diff;
      }
      return err;
    }
    (void)model;
    for (std::size_t j = 0; j < plan_.m; ++j) {
      const double* block = z + j * d;
      const std::vector<double>* cb = by_block_vector_[j];
      std::size_t best_c = 0;
      if (cb != nullptr) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cb->size() / d; ++c) {
          double acc = 0.0;
          for (std::size_t t = 0; t < d; ++t) {
            const double diff = block[t] - (*cb)[c * d + t];
            acc += diff * diff;
          }
          if (acc < best) {
            best = acc;
            best_c = c;
          }
        }
      }
      for (std::size_t t = 0; t < d; ++t) {
        const double g = cb != nullptr ? (*cb)[best_c * d + t] : 0.0;
        const double diff = block[t] - g;
        err += lambda[j * d + t] * diff * diff;
      }
    }
    return err;
  }

 private:
  const ProductPlan& plan_;
  std::map<std::uint64_t, std::shared_ptr<const ScalarQuantizer>> scalar_;
  std::map<std::uint64_t, std::vector<double>> vector_;
  std::vector<const ScalarQuantizer*> by_block_scalar_;
  std::vector<const std::vector<double>*> by_block_vector_;
};

std::vector<double> eigen_head(const SpectrumModel& model, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = model.eigenvalue(j + 1);
  return out;
}

// Row errors for rows [first, first + rows) given their standard normal draws (rows x J).
void block_errors(const PlanQuantizers& q, const ProductPlan& plan, const SpectrumModel& model,
                  const std::vector<double>& lambda, std::span<const double> z, std::size_t rows, std::size_t J,
                  std::span<double> out) {
  const std::size_t coded = plan.m * plan.block_dim;
  const std::size_t rest = J - coded;
  std::vector<double> rest_buf(rows * rest);
  for (std::size_t i = 0; i < rows; ++i) {
    out[i] = q.row_error(z.data() + i * J, model, lambda);
    std::copy_n(z.data() + i * J + coded, rest, rest_buf.begin() + i * rest);
  }
  if (rest == 0) return;
  std::vector<double> extra(rows);
  kernels::weighted_sq_rows(std::span<const double>(lambda).subspan(coded), rest_buf, extra);
  for (std::size_t i = 0; i < rows; ++i) out[i] += extra[i];
}

void check_truncation(const ProductPlan& plan, std::size_t J) {
  if (J < plan.m * plan.block_dim) {
    std::ostringstream msg;
    msg << "truncation J=" << J << " is below the coded dimension m*d=" << plan.m * plan.block_dim;
    fail(Errc::invalid_argument, msg.str());
  }
}

}  // namespace

std::size_t truncation_for_budget(const SpectrumModel& model, double budget, std::size_t j_max) {
  require(budget > 0.0, "truncation_for_budget: budget must be positive");
  if (model.tail_sum(1) <= budget) return 1;
  std::size_t lo = 1;  // fails
  std::size_t hi = 2;
  while (model.tail_sum(hi) > budget) {
    lo = hi;
    if (hi >= j_max) {
      std::ostringstream msg;
      msg << "bias budget " << budget << " needs more than J_max=" << j_max << " coordinates";
      fail(Errc::bias_budget, msg.str());
    }
    hi = std::min(2 * hi, j_max);
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (model.tail_sum(mid) > budget ? lo : hi) = mid;
  }
  return hi;
}

PathSampleBatch sample_paths(const SpectrumModel& model, std::size_t truncation, std::size_t count, std::uint64_t seed,
                             double bias_budget) {
  require(truncation >= 1 && count >= 1, "sample_paths: truncation and count must be positive");
  if (truncation > model.support()) truncation = model.support();
  const double budget = bias_budget > 0.0 ? bias_budget : 1e-6 * model.trace();
  const double bias = model.tail_sum(truncation);
  if (bias > budget) {
    std::ostringstream msg;
    msg << "truncation J=" << truncation << " leaves tail " << bias << " above the bias budget " << budget;
    try {
      msg << "; J >= " << truncation_for_budget(model, budget) << " is required";
    } catch (const Error& e) {
      msg << "; " << e.what();
    }
    fail(Errc::bias_budget, msg.str());
  }
  require(count <= kMaxStoredValues / truncation, "sample_paths: batch too large to store; use the streaming estimators");

  PathSampleBatch batch;
  batch.truncation = truncation;
  batch.count = count;
  batch.seed = seed;
  batch.truncation_bias = bias;
  batch.coefficients.resize(count * truncation);
  CounterStream(seed, kPathStream).fill_normal(0, batch.coefficients);
  const auto lambda = eigen_head(model, truncation);
  std::vector<double> scale(truncation);
  for (std::size_t j = 0; j < truncation; ++j) scale[j] = std::sqrt(lambda[j]);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < truncation; ++j) batch.coefficients[i * truncation + j] *= scale[j];
  return batch;
}

EstimateCI empirical_distortion(const ProductPlan& plan, const SpectrumModel& model, const PathSampleBatch& batch) {
  const std::size_t J = batch.truncation;
  check_truncation(plan, J);
  const PlanQuantizers q(plan, batch.seed);
  const auto lambda = eigen_head(model, J);
  std::vector<double> inv_scale(J);
  for (std::size_t j = 0; j < J; ++j) inv_scale[j] = 1.0 / std::sqrt(lambda[j]);

  std::vector<double> err(batch.count);
  std::vector<double> z;
  for (std::size_t first = 0; first < batch.count; first += kRowBlock) {
    const std::size_t rows = std::min(kRowBlock, batch.count - first);
    z.assign(batch.coefficients.begin() + first * J, batch.coefficients.begin() + (first + rows) * J);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < J; ++j) z[i * J + j] *= inv_scale[j];
    block_errors(q, plan, model, lambda, z, rows, J, std::span<double>(err).subspan(first, rows));
  }
  EstimateCI est = summarize(err, batch.seed);
  est.value += model.tail_sum(J);
  return est;
}

EstimateCI empirical_distortion(const ProductPlan& plan, const SpectrumModel& model, std::size_t truncation,
                                std::size_t count, std::uint64_t seed) {
  require(count >= 2, "empirical_distortion: need at least two samples");
  if (truncation > model.support()) truncation = model.support();
  const std::size_t J = truncation;
  check_truncation(plan, J);
  const PlanQuantizers q(plan, seed);
  const auto lambda = eigen_head(model, J);
  const CounterStream stream(seed, kPathStream);

  std::vector<double> err(count);
  std::vector<double> z;
  for (std::size_t first = 0; first < count; first += kRowBlock) {
    const std::size_t rows = std::min(kRowBlock, count - first);
    z.resize(rows * J);
    stream.fill_normal(first * J, z);
    block_errors(q, plan, model, lambda, z, rows, J, std::span<double>(err).subspan(first, rows));
  }
  EstimateCI est = summarize(err, seed);
  est.value += model.tail_sum(J);
  return est;
}

SmallBallEstimate small_ball(const SpectrumModel& model, double eps, std::size_t truncation, std::size_t count,
                             std::uint64_t seed) {
  require(eps > 0.0 && std::isfinite(eps), "small_ball: eps must be positive");
  require(truncation >= 1 && count >= kMinHits, "small_ball: truncation must be positive and count at least 50");
  if (truncation > model.support()) truncation = model.support();
  const double eps_sq = eps * eps;
  const double bias = model.tail_sum(truncation);
  if (bias > 1e-3 * eps_sq) {
    std::ostringstream msg;
    msg << "truncation J=" << truncation << " leaves tail " << bias << " above 1e-3*eps^2";
    try {
      msg << "; J >= " << truncation_for_budget(model, 1e-3 * eps_sq) << " is required";
    } catch (const Error& e) {
      msg << "; " << e.what();
    }
    fail(Errc::bias_budget, msg.str());
  }

  const std::size_t J = truncation;
  const auto lambda = eigen_head(model, J);
  const CounterStream stream(seed, kPathStream);
  std::size_t hits = 0;
  std::priority_queue<double> smallest;  // the kMinHits smallest squared norms seen so far
  std::vector<double> z, norms;
  for (std::size_t first = 0; first < count; first += kRowBlock) {
    const std::size_t rows = std::min(kRowBlock, count - first);
    z.resize(rows * J);
    norms.resize(rows);
    stream.fill_normal(first * J, z);
    kernels::weighted_sq_rows(lambda, z, norms);
    for (double v : norms) {
      if (v <= eps_sq) ++hits;
      if (smallest.size() < kMinHits) {
        smallest.push(v);
      } else if (v < smallest.top()) {
        smallest.pop();
        smallest.push(v);
      }
    }
  }
  if (hits < kMinHits) {
    std::ostringstream msg;
    msg << "small ball at eps=" << eps << " had " << hits << " hits in " << count
        << " samples (need 50); smallest feasible eps at this sample size is about " << std::sqrt(smallest.top());
    fail(Errc::rare_event, msg.str());
  }

  SmallBallEstimate out;
  out.eps = eps;
  out.samples = count;
  out.hits = hits;
  out.seed = seed;
  out.truncation = J;
  out.truncation_bias = bias;
  out.probability = static_cast<double>(hits) / static_cast<double>(count);
  out.F = -std::log(out.probability);
  out.std_error = std::sqrt((1.0 - out.probability) / (static_cast<double>(count) * out.probability));
  return out;
}

}  // namespace fq
