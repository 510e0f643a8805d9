#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "fq/allocation.hpp"
#include "fq/error.hpp"
#include "fq/scalar_quantizer.hpp"

using namespace fq;

namespace {

// m = max{k : (1/2) sum_{j<=k} log(lambda_j / lambda_k) <= L}, scanned without early exit.
std::size_t brute_critical(const SpectrumModel& model, double log_n, std::size_t k_max) {
  std::size_t best = 1;
  for (std::size_t k = 1; k <= k_max; ++k) {
    long double a = 0.0L;
    for (std::size_t j = 1; j <= k; ++j) a += 0.5L * std::log(static_cast<long double>(model.eigenvalue(j)) / model.eigenvalue(k));
    if (a <= log_n + 1e-12 * std::max(1.0, log_n)) best = k;
  }
  return best;
}

}  // namespace

TEST_SUITE("allocation") {

TEST_CASE("three codebook points on Brownian motion") {
  const auto bm = SpectrumModel::exact_bm();
  const ProductPlan plan = allocate(bm, std::log(3.0));
  REQUIRE(plan.m == 2);
  REQUIRE(plan.materializable);
  CHECK(plan.levels == std::vector<std::uint64_t>{3, 1});
  const PlanDistortion d = plan_distortion(plan, bm);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double l1 = 4.0 / pi2, l2 = 4.0 / (9.0 * pi2);
  const double independent = l1 * oracle::brute_e3_sq() + l2 * 1.0 + (0.5 - l1 - l2);
  CHECK(d.total == doctest::Approx(independent).epsilon(1e-9));
  CHECK(d.exact);
}

TEST_CASE("critical dimension matches the defining scan") {
  const std::vector<SpectrumModel> models = {SpectrumModel::exact_bm(), SpectrumModel::regular_varying(1.0, 3.0, 0.0),
                                             SpectrumModel::regular_varying(1.0, 2.0, 2.0), SpectrumModel::fou(1.0, 0.5)};
  for (const auto& m : models)
    for (double L : {0.1, 1.0, 5.0, 20.0, 60.0}) {
      CAPTURE(m.label());
      CAPTURE(L);
      CHECK(critical_dim(m, L) == brute_critical(m, L, 300));
    }
}

TEST_CASE("a_k is non-decreasing and zero at k = 1") {
  const auto m = SpectrumModel::fbm(0.25);
  CHECK(a_k(m, 1) == 0.0);
  double prev = 0.0;
  for (std::size_t k = 2; k <= 500; ++k) {
    const double a = a_k(m, k);
    CHECK(a >= prev);
    prev = a;
  }
  for (std::size_t d : {2u, 3u}) CHECK(a_k(m, 7, d) >= 0.0);
}

TEST_CASE("plans respect the budget") {
  const std::vector<SpectrumModel> models = {SpectrumModel::exact_bm(), SpectrumModel::ibm(1),
                                             SpectrumModel::regular_varying(1.0, 3.0, 1.0)};
  for (const auto& model : models)
    for (double L : {0.5, std::log(3.0), 4.0, 17.3, 100.0, 900.0}) {
      CAPTURE(model.label());
      CAPTURE(L);
      const ProductPlan plan = allocate(model, L);
      CHECK(plan.m == critical_dim(model, L));
      CHECK(plan.log_levels_sum() <= L + log_budget_slack(L));
      for (std::size_t j = 0; j < plan.m; ++j) {
        CHECK(plan.log_levels[j] >= 0.0);
        if (j > 0) CHECK(plan.log_levels[j] <= plan.log_levels[j - 1]);
        if (plan.materializable) CHECK(std::log(static_cast<double>(plan.levels[j])) == doctest::Approx(plan.log_levels[j]));
      }
    }
}

TEST_CASE("huge budgets stay in the log domain") {
  const auto e = SpectrumModel::explicit_list({4.0, 1.0});
  const ProductPlan plan = allocate(e, 1000.0);
  CHECK_FALSE(plan.materializable);
  CHECK(plan.levels.empty());
  REQUIRE(plan.log_levels.size() == 2);
  CHECK(plan.log_levels[0] - plan.log_levels[1] == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK_THROWS_AS(plan_distortion(plan, e), Error);
  // Representable, but far beyond the exact scalar range.
  const auto rv = SpectrumModel::regular_varying(1.0, 3.0, 0.0);
  const ProductPlan big = allocate(rv, 1e5);
  REQUIRE(big.materializable);
  try {
    plan_distortion(big, rv);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_materializable);
  }
}

TEST_CASE("finite-rank models cap the dimension") {
  const auto e = SpectrumModel::explicit_list({4.0, 1.0, 0.25});
  const ProductPlan plan = allocate(e, 20.0);
  CHECK(plan.m == 3);
  CHECK(plan_distortion(plan, e).tail == 0.0);
}

TEST_CASE("lower bound <= plan <= upper bound") {
  const std::vector<SpectrumModel> models = {SpectrumModel::exact_bm(), SpectrumModel::regular_varying(1.0, 3.0, 0.0),
                                             SpectrumModel::fbm(0.7), SpectrumModel::ou(1.0)};
  for (const auto& model : models)
    for (double L : {2.0, 10.0, 50.0, 300.0}) {
      CAPTURE(model.label());
      CAPTURE(L);
      const double lower = spectral_lower_bound(model, L);
      const double plan = plan_distortion(allocate(model, L), model).total;
      const double upper = product_upper_bound(model, L, 1, kScalarLimit);
      CHECK(lower < plan);
      CHECK(plan < upper);
    }
}

TEST_CASE("continuous allocation is the constrained minimiser") {
  const auto model = SpectrumModel::exact_bm();
  const double L = 6.0;
  const ContinuousAllocation ca = continuous_allocation(model, L, 3);
  double sum = 0.0;
  for (double v : ca.log_z) sum += v;
  CHECK(sum == doctest::Approx(L).epsilon(1e-14));
  const double l1 = model.eigenvalue(1), l2 = model.eigenvalue(2), l3 = model.eigenvalue(3);
  auto cost = [&](double x, double y) { return l1 * std::exp(-2 * x) + l2 * std::exp(-2 * y) + l3 * std::exp(-2 * (L - x - y)); };
  auto inner = [&](double x) { return cost(x, oracle::golden_min([&](double y) { return cost(x, y); }, -5.0, 10.0, 1e-10)); };
  const double x = oracle::golden_min(inner, -5.0, 10.0, 1e-10);
  CHECK(ca.value == doctest::Approx(inner(x)).epsilon(1e-9));
}

TEST_CASE("block plans") {
  const auto bm = SpectrumModel::exact_bm();
  const ProductPlan plan = allocate(bm, 6.0, 2);
  CHECK(plan.block_dim == 2);
  CHECK(plan.block_eigs[0] == bm.eigenvalue(1));
  if (plan.m > 1) CHECK(plan.block_eigs[1] == bm.eigenvalue(3));
  PlanDistortionOptions o;
  o.vq_eval_samples = 50000;
  const PlanDistortion d = plan_distortion(plan, bm, o);
  CHECK_FALSE(d.exact);
  CHECK(d.total > spectral_lower_bound(bm, 6.0));
}

}
