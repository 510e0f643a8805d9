#pragma once

// Reference computations for the tests. Nothing here calls into libfq's
// numerics: the normal law is written with std::erfc, optimisation is plain
// golden-section search and sums are done term by term.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// int_l^u (x - c)^2 phi(x) dx, with l, u possibly infinite.
inline double cell_error(double l, double u, double c) {
  const double pl = std::isinf(l) ? 0.0 : phi(l), pu = std::isinf(u) ? 0.0 : phi(u);
  const double lpl = std::isinf(l) ? 0.0 : l * pl, upu = std::isinf(u) ? 0.0 : u * pu;
  return (1.0 + c * c) * (Phi(u) - Phi(l)) - (upu - lpl) + 2.0 * c * (pu - pl);
}

// E[Z | l < Z < u].
inline double centroid(double l, double u) {
  const double pl = std::isinf(l) ? 0.0 : phi(l), pu = std::isinf(u) ? 0.0 : phi(u);
  return (pl - pu) / (Phi(u) - Phi(l));
}

// Nearest-neighbour distortion of a sorted codebook.
inline double codebook_error(const std::vector<double>& c) {
  const double inf = std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double l = i == 0 ? -inf : 0.5 * (c[i - 1] + c[i]);
    const double u = i + 1 == c.size() ? inf : 0.5 * (c[i] + c[i + 1]);
    d += cell_error(l, u, c[i]);
  }
  return d;
}

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-11) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Optimal symmetric 3- and 4-point codebooks by direct search.
inline double brute_e3_sq() {
  auto f = [](double a) { return codebook_error({-a, 0.0, a}); };
  return f(golden_min(f, 0.1, 3.0));
}

inline double brute_e4_sq() {
  auto inner = [](double a) {
    auto g = [a](double b) { return codebook_error({-b, -a, a, b}); };
    return g(golden_min(g, a, a + 4.0, 1e-10));
  };
  return inner(golden_min(inner, 0.01, 2.0, 1e-10));
}

// Water level for a finite eigenvalue list plus an untouched tail mass
// (eigenvalues below every candidate level): sum min(l_j, t) + tail = eps_sq.
struct Flood {
  double theta = 0.0;
  double R = 0.0;
  std::size_t r = 0;
};

inline Flood flood(const std::vector<double>& lambda, double tail, double eps_sq) {
  auto mass = [&](double t) {
    long double s = tail;
    for (double l : lambda) s += std::min<double>(l, t);
    return static_cast<double>(s);
  };
  double lo = 0.0, hi = lambda.front();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < eps_sq ? lo : hi) = mid;
  }
  Flood out;
  out.theta = 0.5 * (lo + hi);
  long double R = 0.0;
  for (double l : lambda)
    if (l > out.theta) {
      R += 0.5L * std::log(static_cast<long double>(l) / out.theta);
      ++out.r;
    }
  out.R = static_cast<double>(R);
  return out;
}

// Brownian motion eigenvalues (pi (j - 1/2))^{-2}, j = 1..n, and the mass beyond n
// from the Euler-Maclaurin expansion of sum_{j>n} (j - 1/2)^{-2}.
inline std::vector<double> bm_list(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double x = std::numbers::pi * (static_cast<double>(j) - 0.5);
    v[j - 1] = 1.0 / (x * x);
  }
  return v;
}

inline double bm_tail_after(std::size_t n) {
  // Midpoint rule: sum_{k>=n} (k + 1/2)^{-2} = 1/n - 1/(12 n^3) + O(n^-5).
  const double x = static_cast<double>(n);
  return (1.0 / x - 1.0 / (12.0 * x * x * x)) / (std::numbers::pi * std::numbers::pi);
}

// Distortion-rate of the two-point list {4, 1}.
inline double explicit41_eps_sq(double rate) {
  if (rate <= std::log(2.0)) return 4.0 * std::exp(-2.0 * rate) + 1.0;
  return 4.0 * std::exp(-rate);
}

}  // namespace oracle
