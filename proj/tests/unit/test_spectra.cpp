#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "fq/catalog.hpp"
#include "fq/error.hpp"
#include "fq/special.hpp"
#include "fq/spectra.hpp"

using namespace fq;
constexpr double kPi = std::numbers::pi;

TEST_SUITE("spectra") {

TEST_CASE("Brownian motion eigenvalues, trace and tails") {
  const auto bm = SpectrumModel::exact_bm();
  CHECK(bm.tag() == EigenTag::exact);
  for (std::size_t j = 1; j <= 50; ++j) {
    const double x = kPi * (static_cast<double>(j) - 0.5);
    CHECK(bm.eigenvalue(j) == doctest::Approx(1.0 / (x * x)).epsilon(1e-15));
  }
  CHECK(bm.trace() == doctest::Approx(0.5).epsilon(1e-13));
  double head = 0.0;
  for (std::size_t j = 1; j <= 10; ++j) head += bm.eigenvalue(j);
  CHECK(bm.tail_sum(10) == doctest::Approx(0.5 - head).epsilon(1e-12));
  for (std::size_t m : {1000u, 100000u})
    CHECK(bm.tail_sum(m) == doctest::Approx(oracle::bm_tail_after(m)).epsilon(1e-9));
}

TEST_CASE("Brownian bridge") {
  const auto bb = SpectrumModel::brownian_bridge();
  CHECK(bb.eigenvalue(3) == doctest::Approx(1.0 / (9.0 * kPi * kPi)));
  CHECK(bb.trace() == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("tail differences equal explicit partial sums") {
  const std::vector<SpectrumModel> models = {
      SpectrumModel::exact_bm(), SpectrumModel::fbm(0.3), SpectrumModel::regular_varying(1.0, 3.0, 0.0),
      SpectrumModel::regular_varying(2.0, 2.0, 1.5), SpectrumModel::regular_varying(1.0, 1.0, 2.0),
      SpectrumModel::regular_varying(1.0, 2.0, -1.0), SpectrumModel::ibm(1)};
  for (const auto& m : models) {
    CAPTURE(m.label());
    for (auto [lo, hi] : {std::pair<std::size_t, std::size_t>{0, 10}, {5, 3000}, {2000, 50000}}) {
      long double s = 0.0L;
      for (std::size_t j = lo + 1; j <= hi; ++j) s += m.eigenvalue(j);
      const double diff = m.tail_sum(lo) - m.tail_sum(hi);
      const double tol = m.tail(lo).bound + m.tail(hi).bound + 1e-13 * m.tail_sum(lo);
      CHECK(std::abs(diff - static_cast<double>(s)) <= tol);
      if (lo > 0) CHECK(m.partial_sum(hi) - m.partial_sum(lo) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("eigenvalues are positive and non-increasing") {
  for (const auto& text : catalog_names()) {
    if (text == "explicit") continue;
    const Process p = make_process(text);
    CAPTURE(text);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= 5000; ++j) {
      const double l = p.model.eigenvalue(j);
      CHECK(l > 0.0);
      CHECK(l <= prev);
      CHECK(std::log(l) == doctest::Approx(p.model.log_eigenvalue(j)).epsilon(1e-12));
      prev = l;
    }
  }
}

TEST_CASE("regular variation constants") {
  const auto rv = SpectrumModel::regular_varying(2.0, 3.0, 0.0);
  CHECK(rv.eigenvalue(10) == doctest::Approx(2.0 / 1000.0));
  const auto fbm = SpectrumModel::fbm(0.5);
  const auto bm = SpectrumModel::exact_bm();
  CHECK(fbm.asymptotic().c == doctest::Approx(bm.asymptotic().c).epsilon(1e-12));
  CHECK(fbm.asymptotic().b == 2.0);
  const auto ibm = SpectrumModel::ibm(2);
  CHECK(ibm.asymptotic().c == doctest::Approx(std::pow(kPi, -6.0)).epsilon(1e-13));
  CHECK(ibm.asymptotic().b == 6.0);
}

TEST_CASE("explicit lists") {
  const auto e = SpectrumModel::explicit_list({4.0, 1.0});
  CHECK(e.support() == 2);
  CHECK(e.trace() == 5.0);
  CHECK(e.tail_sum(1) == 1.0);
  CHECK(e.tail_sum(2) == 0.0);
  CHECK(e.eigenvalue(3) == 0.0);
  CHECK_THROWS_AS(SpectrumModel::explicit_list({1.0, 2.0}), Error);
  CHECK_THROWS_AS(SpectrumModel::explicit_list({1.0, -1.0}), Error);
}

TEST_CASE("Hurwitz zeta against direct sums") {
  for (double s : {1.5, 2.0, 3.0, 4.5})
    for (double q : {0.5, 1.0, 7.25}) {
      long double sum = 0.0L;
      const std::size_t n = 200000;
      for (std::size_t k = 0; k < n; ++k) sum += std::pow(static_cast<long double>(q + k), -s);
      // int_{n}^{inf} (q + x)^{-s} dx plus half the first omitted term.
      const double x = q + static_cast<double>(n);
      const double rem = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
      CHECK(hurwitz_zeta(s, q) == doctest::Approx(static_cast<double>(sum) + rem).epsilon(1e-10));
    }
  CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-14));
}

TEST_CASE("head plus tail is the trace") {
  for (const auto& m : {SpectrumModel::exact_bm(), SpectrumModel::fbm(0.3), SpectrumModel::ou(2.0),
                        SpectrumModel::regular_varying(1.0, 2.5, 1.0)}) {
    CAPTURE(m.label());
    for (std::size_t k : {1u, 7u, 100u, 5000u}) {
      double head = 0.0;
      for (std::size_t j = 1; j <= k; ++j) head += m.eigenvalue(j);
      CHECK(head + m.tail_sum(k) == doctest::Approx(m.trace()).epsilon(1e-10));
    }
  }
}

TEST_CASE("compensated summation") {
  std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
}

}

TEST_SUITE("nystrom") {

TEST_CASE("Brownian motion kernel") {
  const auto r = nystrom_eigs(kernels_cov::brownian_motion(), 400);
  for (std::size_t k = 1; k <= 10; ++k) {
    const double x = kPi * (static_cast<double>(k) - 0.5);
    CHECK(r.eigenvalues[k - 1] == doctest::Approx(1.0 / (x * x)).epsilon(5e-3));
  }
  CHECK(r.matrix_trace == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("kernel traces match the spectrum traces") {
  CHECK(kernels_cov::brownian_motion().diagonal_integral == doctest::Approx(0.5));
  CHECK(kernels_cov::brownian_bridge().diagonal_integral == doctest::Approx(1.0 / 6.0));
  for (int m : {0, 1, 2}) {
    const auto ibm = kernels_cov::ibm(m);
    double acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) / n;
      acc += ibm.eval(&t, &t) / n;
    }
    CHECK(ibm.diagonal_integral == doctest::Approx(acc).epsilon(1e-7));
  }
}

TEST_CASE("sheet kernel factorises") {
  const auto k = kernels_cov::sheet({kernels_cov::brownian_motion(), kernels_cov::brownian_motion()});
  const double s[2] = {0.3, 0.6}, t[2] = {0.5, 0.2};
  CHECK(k.eval(s, t) == doctest::Approx(0.3 * 0.2));
  const auto r = nystrom_eigs(k, 40);
  const auto bm = SpectrumModel::exact_bm();
  CHECK(r.eigenvalues[0] == doctest::Approx(bm.eigenvalue(1) * bm.eigenvalue(1)).epsilon(0.02));
}

TEST_CASE("constant kernel has rank one") {
  const auto r = nystrom_eigs(kernels_cov::constant(), 50);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 1; k < r.eigenvalues.size(); ++k) CHECK(std::abs(r.eigenvalues[k]) < 1e-12);
}

TEST_CASE("rejects oversized grids") {
  const auto k = kernels_cov::sheet({kernels_cov::brownian_motion(), kernels_cov::brownian_motion()});
  CHECK_THROWS_AS(nystrom_eigs(k, 1000), Error);
}

}
