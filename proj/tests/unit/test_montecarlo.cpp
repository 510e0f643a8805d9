#include <doctest.h>

#include <cmath>

#include "fq/allocation.hpp"
#include "fq/error.hpp"
#include "fq/montecarlo.hpp"
#include "fq/rate_distortion.hpp"

using namespace fq;

TEST_SUITE("montecarlo") {

TEST_CASE("truncation for a bias budget is minimal") {
  const auto bm = SpectrumModel::exact_bm();
  for (double budget : {1e-2, 1e-4, 1e-6}) {
    const std::size_t J = truncation_for_budget(bm, budget);
    CHECK(bm.tail_sum(J) <= budget);
    if (J > 1) CHECK(bm.tail_sum(J - 1) > budget);
  }
  CHECK(truncation_for_budget(SpectrumModel::explicit_list({1.0, 0.5}), 1e-9) == 2);
  try {
    truncation_for_budget(bm, 1e-12, 1000);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bias_budget);
  }
}

TEST_CASE("sample_paths refuses a truncation above the bias budget") {
  const auto bm = SpectrumModel::exact_bm();
  try {
    sample_paths(bm, 10, 5, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bias_budget);
    CHECK(std::string(e.what()).find("J >=") != std::string::npos);
  }
  const PathSampleBatch b = sample_paths(bm, 10, 5, 1, 0.05);
  CHECK(b.coefficients.size() == 50);
  CHECK(b.truncation_bias == bm.tail_sum(10));
}

TEST_CASE("path coordinates have the eigenvalue variances") {
  const auto bm = SpectrumModel::exact_bm();
  const std::size_t n = 100000;
  const PathSampleBatch b = sample_paths(bm, 4, n, 3, 1.0);
  for (std::size_t j = 0; j < 4; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += b.coefficients[i * 4 + j] * b.coefficients[i * 4 + j];
    CHECK(v / n == doctest::Approx(bm.eigenvalue(j + 1)).epsilon(0.02));
  }
}

TEST_CASE("batch and streaming estimators agree") {
  const auto bm = SpectrumModel::exact_bm();
  const ProductPlan plan = allocate(bm, std::log(12.0));
  const std::size_t J = 40;
  const PathSampleBatch batch = sample_paths(bm, J, 20000, 8, 1.0);
  const EstimateCI a = empirical_distortion(plan, bm, batch);
  const EstimateCI b = empirical_distortion(plan, bm, J, 20000, 8);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  CHECK(a.std_error == doctest::Approx(b.std_error).epsilon(1e-9));
}

TEST_CASE("empirical distortion covers the exact plan value") {
  const auto bm = SpectrumModel::exact_bm();
  for (double L : {std::log(3.0), 3.0}) {
    const ProductPlan plan = allocate(bm, L);
    const EstimateCI e = empirical_distortion(plan, bm, plan.m + 30, 200000, 17);
    CHECK(e.covers(plan_distortion(plan, bm).total, 4.0));
  }
}

TEST_CASE("truncation below the coded dimension is rejected") {
  const auto bm = SpectrumModel::exact_bm();
  const ProductPlan plan = allocate(bm, 10.0);
  CHECK_THROWS_AS(empirical_distortion(plan, bm, 1, 100, 1), Error);
}

TEST_CASE("small-ball probabilities") {
  const auto bm = SpectrumModel::exact_bm();
  const double eps = 0.3;
  const std::size_t J = truncation_for_budget(bm, 1e-3 * eps * eps);
  const SmallBallEstimate s = small_ball(bm, eps, J, 20000, 2);
  CHECK(s.hits >= 50);
  CHECK(s.F == doctest::Approx(-std::log(s.probability)));
  const double R = waterfill(bm, eps).R;
  CHECK(s.F < 1.5 * R);
  CHECK(s.F > 0.5 * (4.0 / 9.0) * R);
  try {
    small_ball(bm, 0.05, truncation_for_budget(bm, 1e-3 * 0.05 * 0.05), 1000, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rare_event);
  }
  try {
    small_ball(bm, eps, 3, 1000, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bias_budget);
  }
}

}
