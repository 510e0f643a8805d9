#include "fq/special.hpp"

#include <array>
#include <cmath>

#include "fq/error.hpp"

namespace fq {

namespace {

// B_{2j} / (2j)! for j = 1..10.
constexpr std::array<double, 10> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
};

}  // namespace

double hurwitz_zeta(double s, double q) {
  require(s > 1.0, "hurwitz_zeta: s must exceed 1");
  require(q > 0.0, "hurwitz_zeta: q must be positive");

  // Direct terms until the Euler-Maclaurin tail is well inside its asymptotic regime.
  const int direct = q >= 25.0 ? 0 : static_cast<int>(std::ceil(25.0 - q));
  const double x = q + direct;

  CompensatedSum acc;
  for (int k = direct - 1; k >= 0; --k) acc.add(std::pow(q + k, -s));

  double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  double rising = s;               // s (s+1) ... (s+2j-2)
  double power = std::pow(x, -s - 1.0);
  const double inv_x2 = 1.0 / (x * x);
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    const double term = kBernoulliOverFactorial[j] * rising * power;
    tail += term;
    if (std::abs(term) < 1e-18 * std::abs(tail)) break;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power *= inv_x2;
  }
  acc.add(tail);
  return acc.value();
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    carry_ += (sum_ - t) + x;
  } else {
    carry_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

}  // namespace fq
