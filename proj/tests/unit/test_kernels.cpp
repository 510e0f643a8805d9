#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "fq/kernels.hpp"
#include "fq/rng.hpp"

using namespace fq;

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("nearest_centroid matches a brute-force loop") {
  for (std::size_t dim : {1u, 2u, 3u, 5u, 8u}) {
    const std::size_t n = 1031, k = 37;
    const auto pts = random_values(n * dim, 1 + dim);
    const auto cen = random_values(k * dim, 100 + dim);
    std::vector<std::uint32_t> idx(n);
    std::vector<double> d2(n);
    kernels::scalar::nearest_centroid(pts, dim, cen, idx, d2);
    for (std::size_t i = 0; i < n; ++i) {
      double best = 1e300;
      std::uint32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double acc = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
          const double diff = pts[i * dim + t] - cen[c * dim + t];
          acc += diff * diff;
        }
        if (acc < best) {
          best = acc;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      CHECK(idx[i] == arg);
      CHECK(d2[i] == doctest::Approx(best).epsilon(1e-14));
    }
  }
}

TEST_CASE("ties go to the lowest index") {
  const std::vector<double> pts = {0.0, 0.5, 1.0};
  const std::vector<double> cen = {1.0, -1.0, 0.0, 0.0};
  std::vector<std::uint32_t> idx(3);
  std::vector<double> d2(3);
  for (auto isa : {kernels::Isa::scalar, kernels::Isa::avx2}) {
    if (!kernels::available(isa)) continue;
    kernels::nearest_centroid(pts, 1, cen, idx, d2, isa);
    CHECK(idx[0] == 2);
    CHECK(idx[1] == 0);
    CHECK(idx[2] == 0);
  }
}

TEST_CASE("avx2 nearest_centroid is bit-identical to the reference") {
  if (!kernels::available(kernels::Isa::avx2)) {
    MESSAGE("AVX2 not available on this machine; skipped");
    return;
  }
  for (std::size_t dim : {1u, 2u, 3u, 4u, 7u, 16u}) {
    for (std::size_t k : {1u, 2u, 5u, 64u}) {
      const std::size_t n = 523;
      const auto pts = random_values(n * dim, 7 * dim + k);
      auto cen = random_values(k * dim, 11 * dim + k);
      if (k > 2) std::copy_n(cen.begin(), dim, cen.begin() + dim);  // duplicated centroid
      std::vector<std::uint32_t> i1(n), i2(n);
      std::vector<double> d1(n), d2(n);
      kernels::scalar::nearest_centroid(pts, dim, cen, i1, d1);
      kernels::avx2::nearest_centroid(pts, dim, cen, i2, d2);
      CHECK(i1 == i2);
      CHECK(std::memcmp(d1.data(), d2.data(), n * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("weighted_sq_rows variants agree") {
  for (std::size_t J : {1u, 3u, 4u, 5u, 17u, 1000u}) {
    const std::size_t rows = 77;
    const auto w = random_values(J, 3 + J, 0.1);
    std::vector<double> wpos(w.size());
    for (std::size_t j = 0; j < J; ++j) wpos[j] = std::abs(w[j]);
    const auto x = random_values(rows * J, 5 + J);
    std::vector<double> ref(rows), out(rows);
    kernels::scalar::weighted_sq_rows(wpos, x, ref);
    for (std::size_t r = 0; r < rows; ++r) {
      long double s = 0.0L;
      for (std::size_t j = 0; j < J; ++j) s += static_cast<long double>(wpos[j]) * x[r * J + j] * x[r * J + j];
      CHECK(ref[r] == doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
    }
    if (kernels::available(kernels::Isa::avx2)) {
      kernels::avx2::weighted_sq_rows(wpos, x, out);
      for (std::size_t r = 0; r < rows; ++r) CHECK(out[r] == doctest::Approx(ref[r]).epsilon(1e-13));
    }
  }
}

TEST_CASE("dispatcher reports a usable variant") {
  CHECK(kernels::available(kernels::active()));
  CHECK(kernels::available(kernels::Isa::scalar));
}

}

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible and addressable") {
  const CounterStream s(42, 7);
  std::vector<double> a(1000), b(600);
  s.fill_normal(0, a);
  s.fill_normal(400, b);
  for (std::size_t i = 0; i < 600; ++i) CHECK(a[400 + i] == b[i]);
  CHECK(s.normal(123) == a[123]);
  CHECK(CounterStream(42, 7).uniform(5) == s.uniform(5));
  CHECK(CounterStream(43, 7).uniform(5) != s.uniform(5));
  CHECK(CounterStream(42, 8).uniform(5) != s.uniform(5));
  CHECK(s.derive(1).uniform(0) != s.derive(2).uniform(0));
}

TEST_CASE("uniforms stay inside the open interval and normals have unit moments") {
  const CounterStream s(1, 1);
  const std::size_t n = 400000;
  std::vector<double> z(n);
  s.fill_normal(0, z);
  double m = 0.0, v = 0.0;
  for (double x : z) m += x;
  m /= n;
  for (double x : z) v += (x - m) * (x - m);
  v /= n - 1;
  CHECK(std::abs(m) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(v - 1.0) < 5.0 * std::sqrt(2.0 / n));
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = s.uniform(i);
    CHECK((u > 0.0 && u < 1.0));
  }
}

TEST_CASE("philox known-answer vector") {
  // Random123 reference: all-zero counter and key.
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);
}

TEST_CASE("inverse-cdf normal") {
  CHECK(normal_from_uniform(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_from_uniform(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_from_uniform(1e-300) < -37.0);
}

}
