#pragma once

// Sharp asymptotic constants for e_n under regularly varying eigenvalues
// lambda_j ~ c j^{-b} (log j)^{-a}.

namespace fq {

enum class LawForm { index_minus_one, index_b };

struct SharpLaw {
  LawForm form = LawForm::index_b;
  double c = 0.0;
  double b = 0.0;
  double a = 0.0;
  double k_sharp = 0.0;             ///< e_n ~ k_sharp * rate(log n)
  double log_exponent = 0.0;        ///< exponent of log n in the rate
  double loglog_exponent = 0.0;     ///< exponent of log log n in the rate
  double scalar_ratio_bound = 1.0;  ///< limsup of the scalar product plan error over e_n

  /// psi matching `form`, so that e_n^2 ~ const / psi(log n).
  double psi(double x) const;
  double rate(double log_n) const;
  double predicted(double log_n) const { return k_sharp * rate(log_n); }
  /// (b/2)^{b-1} b/(b-1) for index b, 1 for index -1: e_n^2 psi(log n) tends to this.
  double psi_constant() const;
};

/// b > 1 gives the index-b law; b == 1 with a > 1 gives the index -1 law.
SharpLaw sharp_constant(double c, double b, double a);

/// ((1 + 4 C(1) (b-1)) / b)^{1/2}.
double scalar_ratio_bound(double b, double c1);

/// Asymptotic inverse of psi(x) = x^{b-1} (log x)^a / c.
double psi_tilde(double c, double b, double a, double y);

/// R(eps) ~ (b/2) (b/(b-1))^{1/(b-1)} psi_tilde(eps^{-2}).
double rd_asymptotic_psi(double c, double b, double a, double eps);

}  // namespace fq
