#include "fq/asymptotics.hpp"

#include <cmath>

#include "fq/error.hpp"
#include "fq/scalar_quantizer.hpp"

namespace fq {

double scalar_ratio_bound(double b, double c1) {
  require(b > 1.0, "scalar_ratio_bound: need b > 1");
  return std::sqrt((1.0 + 4.0 * c1 * (b - 1.0)) / b);
}

SharpLaw sharp_constant(double c, double b, double a) {
  require(c > 0.0, "sharp_constant: c must be positive");
  require(b >= 1.0, "sharp_constant: b < 1 has a divergent trace");
  SharpLaw law;
  law.c = c;
  law.b = b;
  law.a = a;
  if (b == 1.0) {
    require(a > 1.0, "sharp_constant: b = 1 needs a > 1");
    law.form = LawForm::index_minus_one;
    law.k_sharp = std::sqrt(c / (a - 1.0));
    law.log_exponent = 0.0;
    law.loglog_exponent = -(a - 1.0) / 2.0;
    law.scalar_ratio_bound = 1.0;
    return law;
  }
  law.form = LawForm::index_b;
  law.k_sharp = std::sqrt(c * law.psi_constant());
  law.log_exponent = -(b - 1.0) / 2.0;
  law.loglog_exponent = -a / 2.0;
  law.scalar_ratio_bound = scalar_ratio_bound(b, kScalarLimit);
  return law;
}

double SharpLaw::psi_constant() const {
  if (form == LawForm::index_minus_one) return 1.0;
  return std::pow(b / 2.0, b - 1.0) * b / (b - 1.0);
}

double SharpLaw::psi(double x) const {
  require(x > 1.0, "psi: argument must exceed 1");
  if (form == LawForm::index_minus_one) return (a - 1.0) * std::pow(std::log(x), a - 1.0) / c;
  // 1 / (x phi(x)) with phi(x) = c x^{-b} (log x)^{-a}.
  double v = std::pow(x, b - 1.0) / c;
  if (a != 0.0) v *= std::pow(std::log(x), a);
  return v;
}

double SharpLaw::rate(double log_n) const {
  require(log_n > 1.0, "rate: log n must exceed 1 so that log log n is positive");
  return std::pow(log_n, log_exponent) * std::pow(std::log(log_n), loglog_exponent);
}

double psi_tilde(double c, double b, double a, double y) {
  require(b > 1.0, "psi_tilde: need b > 1");
  require(c > 0.0 && y > 0.0, "psi_tilde: c and y must be positive");
  const double base = std::pow(c * y, 1.0 / (b - 1.0));
  if (a == 0.0) return base;
  require(base > 1.0, "psi_tilde: argument too small for the log correction");
  return base * std::pow(std::log(base), -a / (b - 1.0));
}

double rd_asymptotic_psi(double c, double b, double a, double eps) {
  require(eps > 0.0, "rd_asymptotic_psi: eps must be positive");
  return 0.5 * b * std::pow(b / (b - 1.0), 1.0 / (b - 1.0)) * psi_tilde(c, b, a, 1.0 / (eps * eps));
}

}  // namespace fq
