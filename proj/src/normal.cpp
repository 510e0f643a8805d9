#include "fq/normal.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "fq/error.hpp"

namespace fq::normal {

double pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

double sf(double x) noexcept { return 0.5 * std::erfc(x / kSqrt2); }

double mass(double lo, double hi) noexcept {
  if (!(lo < hi)) return 0.0;
  if (lo >= 0.0) return sf(lo) - sf(hi);
  if (hi <= 0.0) return cdf(hi) - cdf(lo);
  // Straddles zero: erf is accurate around the origin.
  const double up = std::isinf(hi) ? 1.0 : std::erf(hi / kSqrt2);
  const double dn = std::isinf(lo) ? -1.0 : std::erf(lo / kSqrt2);
  return 0.5 * (up - dn);
}

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(Errc::invalid_argument, "normal quantile needs p in (0,1)");
  if (p == 0.5) return 0.0;
  // erfc_inv keeps full relative accuracy in both tails.
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace fq::normal
