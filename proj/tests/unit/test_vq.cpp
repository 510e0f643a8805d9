#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fq/scalar_quantizer.hpp"
#include "fq/vector_quantizer.hpp"

using namespace fq;

namespace {

VqOptions quick() {
  VqOptions o;
  o.restarts = 3;
  o.iterations = 30;
  o.eval_samples = 400000;
  return o;
}

}  // namespace

TEST_SUITE("vector_quantizer") {

TEST_CASE("one dimension reproduces the Lloyd-Max quantizer") {
  const VectorQuantizer q = train_vq(1, 4, 3, quick());
  const double exact = ScalarQuantizerCache::global().distortion(4);
  CHECK(q.distortion_estimate.covers(exact, 4.0));
  std::vector<double> c = q.codepoints;
  std::sort(c.begin(), c.end());
  const auto ref = ScalarQuantizerCache::global().quantizer(4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(c[i] - ref->codepoints[i]) < 0.02);
}

TEST_CASE("four points in the plane reach the product of two-level quantizers") {
  // The optimal 4-point quantizer of N(0, I_2) is a square with vertices (+-1, +-1) sqrt(2/pi),
  // up to rotation.
  const double target = 2.0 * (1.0 - 2.0 / std::numbers::pi);
  const VectorQuantizer q = train_vq(2, 4, 11, quick());
  CHECK(q.distortion_estimate.covers(target, 4.0));
  for (std::size_t c = 0; c < 4; ++c)
    CHECK(std::hypot(q.codepoints[c * 2], q.codepoints[c * 2 + 1]) == doctest::Approx(std::sqrt(4.0 / std::numbers::pi)).epsilon(0.03));
}

TEST_CASE("training is deterministic in the seed") {
  VqOptions o = quick();
  o.eval_samples = 1000;
  const VectorQuantizer a = train_vq(3, 8, 5, o), b = train_vq(3, 8, 5, o), c = train_vq(3, 8, 6, o);
  CHECK(a.codepoints == b.codepoints);
  CHECK(a.distortion_estimate.value == b.distortion_estimate.value);
  CHECK(a.codepoints != c.codepoints);
}

TEST_CASE("single-point codebook at the origin costs the dimension") {
  const std::vector<double> origin(3, 0.0);
  const EstimateCI e = evaluate_codebook(origin, 3, 200000, 9);
  CHECK(e.covers(3.0, 4.0));
  const VectorQuantizer q = train_vq(3, 1, 1, quick());
  for (double x : q.codepoints) CHECK(std::abs(x) < 0.02);
}

TEST_CASE("summarize") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const EstimateCI e = summarize(v, 0);
  CHECK(e.value == 2.5);
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.samples == 4);
}

TEST_CASE("scaled distortion table in two dimensions") {
  VqOptions o = quick();
  o.restarts = 2;
  o.eval_samples = 50000;
  const auto rows = estimate_cd(2, 6, 1, o);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].scaled == doctest::Approx(2.0).epsilon(0.02));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].running_sup >= rows[i - 1].running_sup);
}

}
