#pragma once

#include <span>

namespace fq {

/// Hurwitz zeta: sum_{k>=0} (q + k)^{-s}, for s > 1 and q > 0.
double hurwitz_zeta(double s, double q);

/// Sum of values with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

}  // namespace fq
