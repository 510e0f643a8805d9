#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "fq/allocation.hpp"
#include "fq/asymptotics.hpp"
#include "fq/rate_distortion.hpp"

using namespace fq;

TEST_SUITE("rate_distortion") {

TEST_CASE("water level identities on Brownian motion") {
  const auto bm = SpectrumModel::exact_bm();
  for (int i = 0; i < 50; ++i) {
    const double eps = 0.01 * std::pow(60.0, i / 49.0);
    const WaterfillSolution w = waterfill(bm, eps);
    CAPTURE(eps);
    REQUIRE(w.r >= 1);
    CHECK(w.theta <= bm.eigenvalue(w.r));
    CHECK(w.theta >= bm.eigenvalue(w.r + 1));
    const double flooded = static_cast<double>(w.r) * w.theta + bm.tail_sum(w.r);
    CHECK(std::abs(flooded - eps * eps) <= 1e-12 * eps * eps);
  }
}

TEST_CASE("agrees with flooding a long explicit list") {
  const std::size_t n = 200000;
  const auto list = oracle::bm_list(n);
  const double tail = oracle::bm_tail_after(n);
  const auto bm = SpectrumModel::exact_bm();
  for (double eps : {0.03, 0.1, 0.3, 0.6}) {
    const auto ref = oracle::flood(list, tail, eps * eps);
    const WaterfillSolution w = waterfill(bm, eps);
    CAPTURE(eps);
    CHECK(w.r == ref.r);
    CHECK(w.theta == doctest::Approx(ref.theta).epsilon(1e-9));
    CHECK(w.R == doctest::Approx(ref.R).epsilon(1e-9));
  }
}

TEST_CASE("two-point boundary case") {
  const auto e = SpectrumModel::explicit_list({4.0, 1.0});
  const WaterfillSolution w = waterfill_sq(e, 2.0);
  CHECK(w.r == 1);
  CHECK(w.theta == 1.0);
  CHECK(w.R == std::log(2.0));
  const WaterfillSolution z = waterfill_sq(e, 5.0);
  CHECK(z.zero_rate);
  CHECK(z.R == 0.0);
}

TEST_CASE("distortion-rate inverts the rate on a two-point list") {
  const auto e = SpectrumModel::explicit_list({4.0, 1.0});
  for (double rate : {0.1, 0.5, std::log(2.0), 1.0, 3.0, 8.0}) {
    const double eps = distortion_rate(e, rate);
    CHECK(eps * eps == doctest::Approx(oracle::explicit41_eps_sq(rate)).epsilon(1e-10));
  }
}

TEST_CASE("R is decreasing in eps and inverts through distortion_rate") {
  const auto m = SpectrumModel::regular_varying(1.0, 3.0, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps = 0.005; eps < 0.9; eps *= 1.3) {
    const double R = waterfill(m, eps).R;
    CHECK(R <= prev);
    prev = R;
    if (R > 0.0) CHECK(distortion_rate(m, R) == doctest::Approx(eps).epsilon(1e-9));
  }
}

TEST_CASE("small-eps asymptotics") {
  const auto bm = SpectrumModel::exact_bm();
  const double c = 1.0 / (std::numbers::pi * std::numbers::pi);
  for (double eps : {0.01, 0.003}) {
    // b = 2, a = 0 reduces to 2c eps^-2.
    CHECK(rd_asymptotic(c, 2.0, 0.0, eps) == doctest::Approx(2.0 * c / (eps * eps)).epsilon(1e-12));
    CHECK(waterfill(bm, eps).R / rd_asymptotic(c, 2.0, 0.0, eps) == doctest::Approx(1.0).epsilon(0.01));
  }
  for (double a : {0.0, 1.5})
    CHECK(rd_asymptotic(0.5, 3.0, a, 1e-4) == doctest::Approx(rd_asymptotic_psi(0.5, 3.0, a, 1e-4)).epsilon(0.05));
}

TEST_CASE("reproducing distribution") {
  const auto bm = SpectrumModel::exact_bm();
  const double eps = 0.2;
  const ReproducingSample s = sample_reproducing(bm, eps, 100000, 4);
  const WaterfillSolution w = waterfill(bm, eps);
  REQUIRE(s.r == w.r);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.count; ++i)
    for (std::size_t j = 0; j < s.r; ++j) {
      const double d = s.x[i * s.r + j] - s.y[i * s.r + j];
      acc += d * d;
    }
  const double mean = acc / static_cast<double>(s.count) + s.tail_r;
  CHECK(mean == doctest::Approx(eps * eps).epsilon(0.02));
  // Y_j has variance lambda_j - theta.
  double v = 0.0;
  for (std::size_t i = 0; i < s.count; ++i) v += s.y[i * s.r] * s.y[i * s.r];
  CHECK(v / static_cast<double>(s.count) == doctest::Approx(bm.eigenvalue(1) - w.theta).epsilon(0.02));
}

TEST_CASE("n(eps) bracket") {
  const auto bm = SpectrumModel::exact_bm();
  for (double eps : {0.4, 0.2, 0.1}) {
    const NepsBracket b = n_eps_bracket(bm, eps);
    CAPTURE(eps);
    CHECK(b.log_lower == doctest::Approx(waterfill(bm, eps).R));
    CHECK(b.log_lower <= b.log_upper);
    REQUIRE(b.upper_materialized);
    const ProductPlan plan = allocate(bm, b.log_upper);
    CHECK(plan_distortion(plan, bm).total <= eps * eps);
    if (b.n_upper > 1) {
      const ProductPlan smaller = allocate(bm, std::log(static_cast<double>(b.n_upper - 1)));
      CHECK(plan_distortion(smaller, bm).total > eps * eps);
    }
  }
}

}
