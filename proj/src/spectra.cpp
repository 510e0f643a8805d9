#include "fq/spectra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "fq/error.hpp"
#include "fq/special.hpp"

namespace fq {

namespace {

constexpr double kPi = std::numbers::pi;

// Explicit summation length before the Euler-Maclaurin remainder takes over (log forms only).
constexpr std::size_t kDirectTerms = 2000;

bool same_index(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }

}  // namespace

const char* to_string(SpectrumKind kind) noexcept {
  switch (kind) {
    case SpectrumKind::exact_bm: return "exact_bm";
    case SpectrumKind::brownian_bridge: return "brownian_bridge";
    case SpectrumKind::gaussian_diffusion: return "gaussian_diffusion";
    case SpectrumKind::stationary: return "stationary";
    case SpectrumKind::fou: return "fou";
    case SpectrumKind::fbm: return "fbm";
    case SpectrumKind::ibm: return "ibm";
    case SpectrumKind::tensor_sheet: return "tensor_sheet";
    case SpectrumKind::regular_varying: return "regular_varying";
    case SpectrumKind::explicit_list: return "explicit_list";
  }
  return "unknown";
}

const char* to_string(EigenTag tag) noexcept { return tag == EigenTag::exact ? "exact" : "asymptotic"; }

double fou_spectral_constant(double a, double rho) {
  require(a > 0.0, "fou: coefficient a must be positive");
  require(rho > 0.0 && rho < 2.0, "fou: index rho must lie in (0, 2)");
  return a * std::tgamma(1.0 + rho) * std::sin(kPi * rho / 2.0) / kPi;
}

double fbm_spectral_constant(double beta) {
  require(beta > 0.0 && beta < 1.0, "fbm: Hurst index must lie in (0, 1)");
  return std::tgamma(1.0 + 2.0 * beta) * std::sin(kPi * beta) / (2.0 * kPi);
}

Asymptotic tensor_asymptotic(const std::vector<double>& c_list, double b) {
  require(!c_list.empty(), "tensor_asymptotic: no factors");
  require(b > 1.0, "tensor_asymptotic: common index must exceed 1");
  double prod = 1.0;
  for (double c : c_list) {
    require(c > 0.0, "tensor_asymptotic: factor constants must be positive");
    prod *= c;
  }
  const double d = static_cast<double>(c_list.size());
  return {prod * std::pow(std::tgamma(d), -b), b, -b * (d - 1.0)};
}

SpectrumModel SpectrumModel::exact_bm() {
  SpectrumModel m;
  m.kind_ = SpectrumKind::exact_bm;
  m.tag_ = EigenTag::exact;
  m.label_ = "bm";
  m.c_ = 1.0 / (kPi * kPi);
  m.b_ = 2.0;
  m.shift_ = 0.5;
  return m;
}

SpectrumModel SpectrumModel::brownian_bridge() {
  SpectrumModel m;
  m.kind_ = SpectrumKind::brownian_bridge;
  m.tag_ = EigenTag::exact;
  m.label_ = "bb";
  m.c_ = 1.0 / (kPi * kPi);
  m.b_ = 2.0;
  return m;
}

SpectrumModel SpectrumModel::gaussian_diffusion() {
  SpectrumModel m = exact_bm();
  m.kind_ = SpectrumKind::gaussian_diffusion;
  m.tag_ = EigenTag::asymptotic;
  m.label_ = "diffusion";
  return m;
}

SpectrumModel SpectrumModel::stationary(double c_h, double b) {
  require(c_h > 0.0, "stationary: spectral constant must be positive");
  require(b > 1.0, "stationary: spectral index must exceed 1");
  SpectrumModel m;
  m.kind_ = SpectrumKind::stationary;
  m.label_ = "stationary";
  m.params_ = {{"c_h", c_h}, {"b", b}};
  m.c_ = 2.0 * c_h * std::pow(kPi, -(b - 1.0));
  m.b_ = b;
  return m;
}

SpectrumModel SpectrumModel::fou(double a, double rho) {
  SpectrumModel m = stationary(fou_spectral_constant(a, rho), 1.0 + rho);
  m.kind_ = SpectrumKind::fou;
  m.label_ = rho == 1.0 ? "ou" : "fou";
  m.params_ = {{"a", a}, {"rho", rho}};
  return m;
}

SpectrumModel SpectrumModel::fbm(double beta) {
  const double c_h = fbm_spectral_constant(beta);
  SpectrumModel m;
  m.kind_ = SpectrumKind::fbm;
  m.label_ = "fbm";
  m.params_ = {{"beta", beta}};
  m.c_ = 2.0 * c_h * std::pow(kPi, -2.0 * beta);
  m.b_ = 1.0 + 2.0 * beta;
  return m;
}

SpectrumModel SpectrumModel::ibm(int order) {
  require(order >= 1, "ibm: integration order must be at least 1");
  SpectrumModel m;
  m.kind_ = SpectrumKind::ibm;
  m.label_ = "ibm";
  m.params_ = {{"m", static_cast<double>(order)}};
  m.b_ = 2.0 * order + 2.0;
  m.c_ = std::pow(kPi, -m.b_);
  return m;
}

SpectrumModel SpectrumModel::tensor_sheet(const std::vector<SpectrumModel>& factors, std::string label) {
  require(!factors.empty(), "tensor_sheet: no factors");
  std::vector<double> cs;
  const double b = factors.front().b_;
  for (const auto& f : factors) {
    require(f.has_asymptotic() && f.a_ == 0.0, "tensor_sheet: factors must have pure power asymptotics");
    if (!same_index(f.b_, b)) fail(Errc::invalid_argument, "tensor_sheet: factors have different decay indices");
    cs.push_back(f.c_);
  }
  const Asymptotic as = tensor_asymptotic(cs, b);
  SpectrumModel m = regular_varying(as.c, as.b, as.a);
  m.kind_ = SpectrumKind::tensor_sheet;
  m.label_ = std::move(label);
  m.params_ = {{"d", static_cast<double>(factors.size())}};
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (const auto& p : factors[i].params_) m.params_.emplace_back(p.first + std::to_string(i + 1), p.second);
  m.factors_ = factors;
  return m;
}

SpectrumModel SpectrumModel::regular_varying(double c, double b, double a) {
  require(c > 0.0, "regular_varying: c must be positive");
  require(b > 1.0 || (b == 1.0 && a > 1.0), "regular_varying: need b > 1, or b = 1 with a > 1 (finite trace)");
  SpectrumModel m;
  m.kind_ = SpectrumKind::regular_varying;
  m.label_ = "rv";
  m.params_ = {{"c", c}, {"b", b}, {"a", a}};
  m.c_ = c;
  m.b_ = b;
  m.a_ = a;
  if (a < 0.0) {
    // x^{-b} log(x+1)^{|a|} rises before it falls; flatten the head at its first descent.
    std::size_t j = 1;
    while (m.formula(static_cast<double>(j)) < m.formula(static_cast<double>(j + 1))) ++j;
    m.j0_ = j;
  }
  return m;
}

SpectrumModel SpectrumModel::explicit_list(std::vector<double> values) {
  require(!values.empty(), "explicit_list: empty list");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]) && values[i] > 0.0, "explicit_list: eigenvalues must be positive");
    require(i == 0 || values[i] <= values[i - 1], "explicit_list: eigenvalues must be nonincreasing");
  }
  SpectrumModel m;
  m.kind_ = SpectrumKind::explicit_list;
  m.tag_ = EigenTag::exact;
  m.label_ = "explicit";
  for (std::size_t i = 0; i < values.size(); ++i) m.params_.emplace_back("l" + std::to_string(i + 1), values[i]);
  m.values_ = std::move(values);
  return m;
}

Asymptotic SpectrumModel::asymptotic() const {
  if (!has_asymptotic()) fail(Errc::invalid_argument, "explicit eigenvalue lists carry no asymptotic form");
  return {c_, b_, a_};
}

double SpectrumModel::formula(double x) const {
  double v = c_ * std::pow(x - shift_, -b_);
  if (a_ != 0.0) v *= std::pow(std::log1p(x), -a_);
  return v;
}

double SpectrumModel::log_formula(double x) const {
  double v = std::log(c_) - b_ * std::log(x - shift_);
  if (a_ != 0.0) v -= a_ * std::log(std::log1p(x));
  return v;
}

double SpectrumModel::integral_from(double x) const {
  if (a_ == 0.0) return c_ * std::pow(x - shift_, 1.0 - b_) / (b_ - 1.0);
  // x = e^y turns the tail into a smooth exponentially (or, for b = 1, algebraically) decaying integral.
  const double y0 = std::log(x);
  auto f = [&](double t) {
    const double y = y0 + t;
    const double logx1 = y + std::log1p(std::exp(-y));
    return c_ * std::exp((1.0 - b_) * y) * std::pow(logx1, -a_);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14, &err);
}

double SpectrumModel::eigenvalue(std::size_t j) const {
  require(j >= 1, "eigenvalue: index is 1-based");
  if (kind_ == SpectrumKind::explicit_list) return j <= values_.size() ? values_[j - 1] : 0.0;
  return formula(static_cast<double>(std::max(j, j0_)));
}

double SpectrumModel::log_eigenvalue(std::size_t j) const {
  require(j >= 1, "log_eigenvalue: index is 1-based");
  if (kind_ == SpectrumKind::explicit_list) {
    require(j <= values_.size(), "log_eigenvalue: index beyond the support");
    return std::log(values_[j - 1]);
  }
  return log_formula(static_cast<double>(std::max(j, j0_)));
}

std::vector<double> SpectrumModel::eigenvalues(std::size_t count) const {
  require(count >= 1, "eigenvalues: count must be positive");
  std::vector<double> out(count);
  for (std::size_t j = 1; j <= count; ++j) out[j - 1] = eigenvalue(j);
  return out;
}

double SpectrumModel::partial_sum(std::size_t m) const {
  if (kind_ == SpectrumKind::explicit_list) m = std::min(m, values_.size());
  CompensatedSum s;
  for (std::size_t j = 1; j <= m; ++j) s.add(eigenvalue(j));
  return s.value();
}

double SpectrumModel::trace() const { return tail(0).value; }

TailSum SpectrumModel::tail(std::size_t m) const {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (kind_ == SpectrumKind::explicit_list) {
    CompensatedSum s;
    for (std::size_t j = m + 1; j <= values_.size(); ++j) s.add(values_[j - 1]);
    return {s.value(), 4.0 * kEps * s.value()};
  }
  if (a_ == 0.0) {
    const double v = c_ * hurwitz_zeta(b_, static_cast<double>(m) + 1.0 - shift_);
    return {v, 64.0 * kEps * v};
  }

  CompensatedSum s;
  // Flat head below j0.
  if (m + 1 < j0_) s.add(static_cast<double>(j0_ - m - 1) * formula(static_cast<double>(j0_)));
  const std::size_t first = std::max(m + 1, j0_);
  const std::size_t last = std::max(first, kDirectTerms);
  for (std::size_t j = first; j <= last; ++j) s.add(formula(static_cast<double>(j)));

  // sum_{j > J} f(j) = int_J^inf f - f(J)/2 - f'(J)/12 + ...
  const double x = static_cast<double>(last);
  const double fx = formula(x);
  const double dfx = fx * (-b_ / x - a_ / ((x + 1.0) * std::log1p(x)));
  s.add(integral_from(x));
  s.add(-0.5 * fx);
  s.add(-dfx / 12.0);
  // The remainder lies between int_{J+1}^inf f and int_J^inf f, a window no wider than f(J).
  return {s.value(), fx};
}

}  // namespace fq
