#pragma once

// Karhunen-Loeve eigenvalue sequences of Gaussian covariance operators.
// Indices are 1-based throughout: eigenvalue(1) is the largest.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fq {

enum class SpectrumKind {
  exact_bm,
  brownian_bridge,
  gaussian_diffusion,
  stationary,
  fou,
  fbm,
  ibm,
  tensor_sheet,
  regular_varying,
  explicit_list,
};

enum class EigenTag { exact, asymptotic };

const char* to_string(SpectrumKind kind) noexcept;
const char* to_string(EigenTag tag) noexcept;

/// lambda_j ~ c j^{-b} (log j)^{-a}.
struct Asymptotic {
  double c = 0.0;
  double b = 0.0;
  double a = 0.0;
};

struct TailSum {
  double value = 0.0;
  double bound = 0.0;  ///< |value - true tail| <= bound
};

class SpectrumModel {
 public:
  static constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max();

  static SpectrumModel exact_bm();
  static SpectrumModel brownian_bridge();
  /// Same eigenvalue asymptotics as Brownian motion; the BM formula is used and tagged asymptotic.
  static SpectrumModel gaussian_diffusion();
  /// Stationary process whose spectral density decays like c_h lambda^{-b}.
  static SpectrumModel stationary(double c_h, double b);
  static SpectrumModel fou(double a, double rho);
  static SpectrumModel ou(double a) { return fou(a, 1.0); }
  static SpectrumModel fbm(double beta);
  static SpectrumModel ibm(int m);
  /// Tensor product sheet; every factor must be pure-power with a common index.
  static SpectrumModel tensor_sheet(const std::vector<SpectrumModel>& factors, std::string label = "sheet");
  static SpectrumModel regular_varying(double c, double b, double a);
  static SpectrumModel explicit_list(std::vector<double> values);

  SpectrumKind kind() const { return kind_; }
  EigenTag tag() const { return tag_; }
  const std::string& label() const { return label_; }
  /// Named parameters, for output headers.
  const std::vector<std::pair<std::string, double>>& params() const { return params_; }

  bool has_asymptotic() const { return kind_ != SpectrumKind::explicit_list; }
  /// (c, b, a) of the leading eigenvalue asymptotics. Throws for explicit lists.
  Asymptotic asymptotic() const;
  /// Number of nonzero eigenvalues, kInfinite for operators of infinite rank.
  std::size_t support() const { return kind_ == SpectrumKind::explicit_list ? values_.size() : kInfinite; }

  double eigenvalue(std::size_t j) const;
  double log_eigenvalue(std::size_t j) const;
  std::vector<double> eigenvalues(std::size_t count) const;

  double trace() const;
  /// sum_{j >= m+1} lambda_j.
  TailSum tail(std::size_t m) const;
  double tail_sum(std::size_t m) const { return tail(m).value; }
  /// sum_{j <= m} lambda_j, computed from the head (not as trace - tail).
  double partial_sum(std::size_t m) const;

  /// First index from which the regular-varying formula is used verbatim.
  std::size_t head_index() const { return j0_; }

 private:
  SpectrumModel() = default;

  double formula(double x) const;      // c x^{-b} (log(x+1))^{-a}, log form
  double log_formula(double x) const;
  double integral_from(double x) const;  // int_x^inf formula
  bool pure_power() const { return a_ == 0.0 && kind_ != SpectrumKind::explicit_list; }

  SpectrumKind kind_ = SpectrumKind::explicit_list;
  EigenTag tag_ = EigenTag::asymptotic;
  std::string label_;
  std::vector<std::pair<std::string, double>> params_;
  double c_ = 0.0, b_ = 0.0, a_ = 0.0;
  double shift_ = 0.0;  // lambda_j = c (j - shift)^{-b} for the exact families
  std::size_t j0_ = 1;
  std::vector<double> values_;
  std::vector<SpectrumModel> factors_;
};

/// Tensor asymptotics: lambda_k ~ K k^{-b} (log k)^{b(d-1)}, K = prod(c) ((d-1)!)^{-b}.
Asymptotic tensor_asymptotic(const std::vector<double>& c_list, double b);

/// Spectral constants used by the catalog.
double fou_spectral_constant(double a, double rho);  ///< c of h(lambda) ~ c lambda^{-(1+rho)}
double fbm_spectral_constant(double beta);           ///< Gamma(1+2beta) sin(pi beta) / (2 pi)

// Covariance kernels and the Nystrom eigensolver.

struct CovarianceKernel {
  std::string name;
  std::size_t dim = 1;  ///< dimension of the parameter set [0,1]^dim
  std::function<double(const double* s, const double* t)> eval;
  double diagonal_integral = 0.0;  ///< int C(t,t) dt, the operator trace
};

namespace kernels_cov {
CovarianceKernel brownian_motion();
CovarianceKernel brownian_bridge();
CovarianceKernel fbm(double beta);
CovarianceKernel fou(double a, double rho);
CovarianceKernel ibm(int m);
CovarianceKernel constant(double value = 1.0);
/// Tensor product of one-dimensional kernels.
CovarianceKernel sheet(const std::vector<CovarianceKernel>& factors);
}  // namespace kernels_cov

struct NystromResult {
  std::vector<double> eigenvalues;  ///< decreasing
  double matrix_trace = 0.0;
  std::size_t grid = 0;
  std::size_t nodes = 0;
};

/// Midpoint-rule Nystrom approximation with `grid` points per axis.
NystromResult nystrom_eigs(const CovarianceKernel& kernel, std::size_t grid);

}  // namespace fq
