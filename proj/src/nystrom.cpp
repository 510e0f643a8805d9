#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fq/error.hpp"
#include "fq/spectra.hpp"

namespace fq {

namespace kernels_cov {

CovarianceKernel brownian_motion() {
  return {"bm", 1, [](const double* s, const double* t) { return std::min(*s, *t); }, 0.5};
}

CovarianceKernel brownian_bridge() {
  return {"bb", 1, [](const double* s, const double* t) { return std::min(*s, *t) - *s * *t; }, 1.0 / 6.0};
}

CovarianceKernel fbm(double beta) {
  require(beta > 0.0 && beta < 1.0, "fbm kernel: Hurst index must lie in (0, 1)");
  const double h2 = 2.0 * beta;
  return {"fbm", 1,
          [h2](const double* s, const double* t) {
            return 0.5 * (std::pow(*s, h2) + std::pow(*t, h2) - std::pow(std::abs(*s - *t), h2));
          },
          1.0 / (h2 + 1.0)};
}

CovarianceKernel fou(double a, double rho) {
  require(a > 0.0, "fou kernel: coefficient must be positive");
  require(rho > 0.0 && rho <= 2.0, "fou kernel: index must lie in (0, 2]");
  return {"fou", 1, [a, rho](const double* s, const double* t) { return std::exp(-a * std::pow(std::abs(*s - *t), rho)); },
          1.0};
}

CovarianceKernel ibm(int m) {
  require(m >= 0, "ibm kernel: order must be nonnegative");
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  std::vector<double> binom(static_cast<std::size_t>(m) + 1, 1.0);
  for (int i = 1; i <= m; ++i) binom[i] = binom[i - 1] * (m - i + 1) / i;
  const double norm = 1.0 / (fact * fact);
  // (1/(m!)^2) int_0^s (s-r)^m (t-r)^m dr for s <= t, expanded binomially in (t - s).
  auto eval = [m, binom, norm](const double* x, const double* y) {
    const double s = std::min(*x, *y);
    const double gap = std::max(*x, *y) - s;
    double acc = 0.0;
    for (int i = 0; i <= m; ++i)
      acc += binom[i] * std::pow(gap, m - i) * std::pow(s, m + i + 1) / (m + i + 1);
    return norm * acc;
  };
  return {"ibm", 1, eval, norm / ((2.0 * m + 1.0) * (2.0 * m + 2.0))};
}

CovarianceKernel constant(double value) {
  return {"constant", 1, [value](const double*, const double*) { return value; }, value};
}

CovarianceKernel sheet(const std::vector<CovarianceKernel>& factors) {
  require(!factors.empty(), "sheet kernel: no factors");
  std::vector<CovarianceKernel> parts = factors;
  std::size_t dim = 0;
  double trace = 1.0;
  std::string name = "sheet(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    dim += parts[i].dim;
    trace *= parts[i].diagonal_integral;
    name += (i ? "," : "") + parts[i].name;
  }
  name += ")";
  auto eval = [parts](const double* s, const double* t) {
    double v = 1.0;
    std::size_t off = 0;
    for (const auto& p : parts) {
      v *= p.eval(s + off, t + off);
      off += p.dim;
    }
    return v;
  };
  return {name, dim, eval, trace};
}

}  // namespace kernels_cov

NystromResult nystrom_eigs(const CovarianceKernel& kernel, std::size_t grid) {
  require(grid >= 2, "nystrom: grid must have at least 2 points");
  require(kernel.dim >= 1 && kernel.eval, "nystrom: kernel is not defined");
  std::size_t nodes = 1;
  for (std::size_t i = 0; i < kernel.dim; ++i) {
    require(nodes <= 20000 / grid, "nystrom: grid too large for a dense eigensolve");
    nodes *= grid;
  }

  // Midpoint tensor grid; node k has axis coordinates given by its base-`grid` digits.
  std::vector<double> pts(nodes * kernel.dim);
  for (std::size_t k = 0; k < nodes; ++k) {
    std::size_t rest = k;
    for (std::size_t t = 0; t < kernel.dim; ++t) {
      pts[k * kernel.dim + t] = (static_cast<double>(rest % grid) + 0.5) / static_cast<double>(grid);
      rest /= grid;
    }
  }

  const double weight = 1.0 / static_cast<double>(nodes);
  Eigen::MatrixXd mat(nodes, nodes);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const double v = kernel.eval(&pts[i * kernel.dim], &pts[j * kernel.dim]);
      require(std::isfinite(v), "nystrom: kernel returned a non-finite value");
      mat(i, j) = v * weight;
      max_abs = std::max(max_abs, std::abs(v));
    }
  }
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(mat(i, j) - mat(j, i)) > 1e-12 * max_abs * weight)
        fail(Errc::invalid_argument, "nystrom: kernel " + kernel.name + " is not symmetric");

  NystromResult out;
  out.grid = grid;
  out.nodes = nodes;
  out.matrix_trace = mat.trace();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(Errc::non_convergence, "nystrom: eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  if (ev(0) < -1e-10 * std::abs(out.matrix_trace)) {
    std::ostringstream msg;
    msg << "nystrom: kernel " << kernel.name << " is not positive semidefinite (eigenvalue " << ev(0) << ")";
    fail(Errc::invalid_argument, msg.str());
  }
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::reverse(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

}  // namespace fq
