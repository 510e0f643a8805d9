#include "fq/rate_distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fq/allocation.hpp"
#include "fq/error.hpp"
#include "fq/rng.hpp"
#include "fq/scalar_quantizer.hpp"
#include "fq/special.hpp"

namespace fq {

namespace {

constexpr std::uint64_t kReproStream = 0x5250;

// g(k) = sum_{j > k} lambda_j + k lambda_k; nonincreasing since g(k) - g(k+1) = k (lambda_k - lambda_{k+1}).
double flood_level(const SpectrumModel& model, std::size_t k) {
  if (k > model.support()) return 0.0;
  return model.tail_sum(k) + static_cast<double>(k) * model.eigenvalue(k);
}

}  // namespace

WaterfillSolution waterfill_sq(const SpectrumModel& model, double eps_sq) {
  require(std::isfinite(eps_sq), "waterfill: distortion must be finite");
  require(eps_sq > 0.0, "waterfill: eps = 0 has infinite rate for an infinite-dimensional law");
  WaterfillSolution w;
  w.eps_sq = eps_sq;
  w.eps = std::sqrt(eps_sq);
  const TailSum total = model.tail(0);
  if (eps_sq >= total.value) {
    w.zero_rate = true;
    w.theta = model.eigenvalue(1);
    w.tail_r = total.value;
    w.tail_bound = total.bound;
    return w;
  }

  // Largest k with g(k) > eps^2: bracket by doubling, then bisect.
  std::size_t lo = 1;
  std::size_t hi = 2;
  while (flood_level(model, hi) > eps_sq) {
    lo = hi;
    require(hi < (std::size_t{1} << 40), "waterfill: eps too small for the water-level search");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (flood_level(model, mid) > eps_sq ? lo : hi) = mid;
  }
  w.r = lo;
  const TailSum tail = model.tail(w.r);
  w.tail_r = tail.value;
  w.tail_bound = tail.bound;
  w.theta = (eps_sq - tail.value) / static_cast<double>(w.r);

  const double log_theta = std::log(w.theta);
  CompensatedSum s;
  for (std::size_t j = 1; j <= w.r; ++j) s.add(model.log_eigenvalue(j) - log_theta);
  w.R = 0.5 * s.value();
  return w;
}

WaterfillSolution waterfill(const SpectrumModel& model, double eps) {
  require(eps > 0.0 && std::isfinite(eps), "waterfill: eps must be positive and finite");
  WaterfillSolution w = waterfill_sq(model, eps * eps);
  w.eps = eps;
  return w;
}

double distortion_rate(const SpectrumModel& model, double rate) {
  require(rate >= 0.0 && std::isfinite(rate), "distortion_rate: rate must be finite and nonnegative");
  const double top = 0.5 * std::log(model.trace());
  if (rate == 0.0) return std::exp(top);

  // R(exp(u)) is decreasing in u; find lo with R >= rate.
  double hi = top;
  double lo = top - 1.0;
  while (waterfill_sq(model, std::exp(2.0 * lo)).R < rate) {
    hi = lo;
    lo -= 1.0;
    require(lo > -300.0, "distortion_rate: rate too large");
  }
  const double tol = 1e-12 * std::max(1.0, rate);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double r = waterfill_sq(model, std::exp(2.0 * mid)).R;
    if (std::abs(r - rate) <= tol) return std::exp(mid);
    (r > rate ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double rd_asymptotic(double c, double b, double a, double eps) {
  require(b > 1.0, "rd_asymptotic: need b > 1");
  require(c > 0.0, "rd_asymptotic: c must be positive");
  require(eps > 0.0 && (a == 0.0 || eps < 1.0), "rd_asymptotic: eps must be positive (and below 1 with a log term)");
  const double inv = 1.0 / (b - 1.0);
  double v = 0.5 * b * std::pow(c * b * inv * std::pow(0.5 * (b - 1.0), a), inv) * std::pow(eps, -2.0 * inv);
  if (a != 0.0) v *= std::pow(std::log(1.0 / eps), -a * inv);
  return v;
}

ReproducingSample sample_reproducing(const SpectrumModel& model, double eps, std::size_t count, std::uint64_t seed) {
  require(count >= 1, "sample_reproducing: count must be positive");
  const WaterfillSolution w = waterfill(model, eps);
  require(!w.zero_rate, "sample_reproducing: eps at or above e_1 has a degenerate reproducing law");
  ReproducingSample out;
  out.r = w.r;
  out.count = count;
  out.theta = w.theta;
  out.tail_r = w.tail_r;
  const std::size_t r = w.r;

  std::vector<double> sx(r), sy(r), sz(r);
  for (std::size_t j = 0; j < r; ++j) {
    const double lam = model.eigenvalue(j + 1);
    const double keep = std::max(0.0, 1.0 - w.theta / lam);
    sx[j] = std::sqrt(lam);
    sy[j] = std::sqrt(lam) * keep;
    sz[j] = std::sqrt(w.theta * keep);
  }
  const CounterStream zs(seed, kReproStream);
  const CounterStream zp = zs.derive(1);
  out.x.resize(count * r);
  out.y.resize(count * r);
  std::vector<double> z(count * r), zprime(count * r);
  zs.fill_normal(0, z);
  zp.fill_normal(0, zprime);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const std::size_t at = i * r + j;
      out.x[at] = sx[j] * z[at];
      out.y[at] = sy[j] * z[at] + sz[j] * zprime[at];
    }
  }
  return out;
}

NepsBracket n_eps_bracket(const SpectrumModel& model, double eps) {
  const WaterfillSolution w = waterfill(model, eps);
  NepsBracket out;
  out.log_lower = w.R;
  if (w.zero_rate) {
    out.n_upper = 1;
    return out;
  }
  const double target = eps * eps;

  // Outcome of the exact d = 1 plan at budget log n: 1 pass, 0 fail, -1 beyond desk scale.
  auto check_log = [&](double log_n) -> int {
    const ProductPlan plan = allocate(model, log_n, 1);
    if (!plan.materializable) return -1;
    if (*std::max_element(plan.levels.begin(), plan.levels.end()) > kDeskScaleLevels) return -1;
    return plan_distortion(plan, model).total <= target ? 1 : 0;
  };
  auto check = [&](std::uint64_t n) { return check_log(std::log(static_cast<double>(n))); };

  constexpr std::uint64_t kIntegerCap = std::uint64_t{1} << 52;
  std::uint64_t lo = 1;  // n = 1 always fails: e_1^2 = trace > eps^2
  std::uint64_t hi = 2;
  int state = 0;
  double last_fail = 0.0;  // log n of the largest budget known to fail
  while (true) {
    state = check(hi);
    if (state != 0 || hi >= kIntegerCap) break;
    lo = hi;
    last_fail = std::log(static_cast<double>(lo));
    hi *= 2;
  }

  if (state == 0) {
    // Past exact integers: continue in log n with real budgets, still building every plan.
    double a = std::log(static_cast<double>(hi));
    double b = 2.0 * a;
    while ((state = check_log(b)) == 0) {
      a = b;
      b *= 2.0;
    }
    if (state == 1) {
      for (int it = 0; it < 200 && b - a > 1e-9 * b; ++it) {
        const double mid = 0.5 * (a + b);
        (check_log(mid) == 1 ? b : a) = mid;
      }
      out.n_upper = 0;
      out.log_upper = b;
      return out;
    }
    last_fail = a;
  }

  if (state == -1) {
    // Beyond desk scale: estimate the budget from the scalar product upper bound instead of building plans.
    out.upper_materialized = false;
    double a = last_fail;
    double b = std::max(2.0 * a, a + 1.0);
    while (product_upper_bound(model, b, 1, kScalarLimit) > target) {
      a = b;
      b *= 2.0;
      require(b < 1e9, "n_eps_bracket: eps too small");
    }
    for (int it = 0; it < 200 && b - a > 1e-9 * b; ++it) {
      const double mid = 0.5 * (a + b);
      (product_upper_bound(model, mid, 1, kScalarLimit) > target ? a : b) = mid;
    }
    out.log_upper = b;
    return out;
  }

  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const int s = check(mid);
    if (s == 1) {
      hi = mid;
    } else {
      lo = mid;  // a beyond-desk-scale midpoint cannot occur below a materialized pass, treat as fail
    }
  }
  out.n_upper = hi;
  out.log_upper = std::log(static_cast<double>(hi));
  return out;
}

}  // namespace fq
