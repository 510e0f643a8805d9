#pragma once

// Standard normal density, distribution and quantile helpers.

namespace fq::normal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = 1.41421356237309504880;

double pdf(double x) noexcept;
/// P(Z <= x).
double cdf(double x) noexcept;
/// P(Z > x), accurate far into the upper tail.
double sf(double x) noexcept;
/// Gaussian mass of [lo, hi], lo <= hi, computed on whichever side avoids cancellation.
double mass(double lo, double hi) noexcept;
/// Inverse of cdf on (0, 1).
double quantile(double p);

}  // namespace fq::normal
