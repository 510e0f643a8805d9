#include "fq/scalar_quantizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "fq/error.hpp"
#include "fq/normal.hpp"
#include "fq/special.hpp"

namespace fq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGaussOrder = 15;

struct GaussRule {
  std::array<double, kGaussOrder> node{};
  std::array<double, kGaussOrder> weight{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, kGaussOrder>;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    GaussRule r;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.node[n] = x[i];
      r.weight[n++] = w[i];
      if (x[i] != 0.0) {
        r.node[n] = -x[i];
        r.weight[n++] = w[i];
      }
    }
    return r;
  }();
  return rule;
}

struct CellStats {
  double mass = 0.0;
  double centroid = 0.0;
  double error = 0.0;  // integral of (x - a)^2 over the cell
};

bool narrow(double lo, double hi) { return std::isfinite(hi) && (hi - lo) * std::max(1.0, std::abs(hi)) <= 2.0; }

// Cell [lo, hi] with 0 <= lo < hi <= inf, codepoint a.
CellStats cell_stats(double lo, double hi, double a) {
  CellStats s;
  if (narrow(lo, hi)) {
    const auto& rule = gauss_rule();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double m = 0.0, first = 0.0, err = 0.0;
    for (int i = 0; i < kGaussOrder; ++i) {
      const double off = half * rule.node[i];
      const double x = mid + off;
      const double w = rule.weight[i] * normal::pdf(x);
      m += w;
      first += w * (off + half);  // (x - lo)
      err += w * (x - a) * (x - a);
    }
    s.mass = half * m;
    s.centroid = lo + first / m;
    s.error = half * err;
    return s;
  }
  const double plo = normal::pdf(lo);
  if (std::isinf(hi)) {
    s.mass = normal::sf(lo);
    s.centroid = plo / s.mass;
    // Conditional variance of Z given Z > lo, written to limit cancellation.
    const double var = 1.0 - s.centroid * (s.centroid - lo);
    const double off = s.centroid - a;
    s.error = s.mass * (var + off * off);
    return s;
  }
  const double phi = normal::pdf(hi);
  s.mass = normal::mass(lo, hi);
  const double first = plo * -std::expm1(-0.5 * (hi - lo) * (hi + lo));  // phi(lo) - phi(hi)
  s.centroid = first / s.mass;
  s.error = (1.0 + a * a) * s.mass - 2.0 * a * first + lo * plo - hi * phi;
  return s;
}

// Symmetric codebook stored by its positive half. For odd k a centre point 0
// owns the cell [-a_0/2, a_0/2].
struct HalfCodebook {
  std::vector<double> a;
  bool odd = false;

  double lower(std::size_t i) const {
    if (i > 0) return 0.5 * (a[i - 1] + a[i]);
    return odd ? 0.5 * a[0] : 0.0;
  }
  double upper(std::size_t i) const { return i + 1 < a.size() ? 0.5 * (a[i] + a[i + 1]) : kInf; }
};

struct Evaluation {
  std::vector<double> mass;
  std::vector<double> gap;  // a_i - centroid_i
  double residual = 0.0;
};

Evaluation evaluate(const HalfCodebook& cb) {
  const std::size_t p = cb.a.size();
  Evaluation ev;
  ev.mass.resize(p);
  ev.gap.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const CellStats s = cell_stats(cb.lower(i), cb.upper(i), cb.a[i]);
    ev.mass[i] = s.mass;
    ev.gap[i] = cb.a[i] - s.centroid;
    ev.residual = std::max(ev.residual, std::abs(ev.gap[i]));
  }
  return ev;
}

bool ordered(const std::vector<double>& a) {
  if (a.empty()) return true;
  if (!(a[0] > 0.0)) return false;
  for (std::size_t i = 1; i < a.size(); ++i)
    if (!(a[i] > a[i - 1])) return false;
  return std::isfinite(a.back());
}

double merit(const Evaluation& ev) {
  double s = 0.0;
  for (std::size_t i = 0; i < ev.gap.size(); ++i) {
    const double f = ev.mass[i] * ev.gap[i];
    s += f * f;
  }
  return s;
}

// Newton direction for F_i = M_i (a_i - centroid_i) = a_i M_i - int_cell x phi.
std::vector<double> newton_step(const HalfCodebook& cb, const Evaluation& ev) {
  const std::size_t p = cb.a.size();
  std::vector<double> diag(p), sub(p, 0.0), sup(p, 0.0), rhs(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double lo = cb.lower(i);
    const double hi = cb.upper(i);
    const double a = cb.a[i];
    const double dlo = normal::pdf(lo) * (lo - a);
    diag[i] = ev.mass[i];
    if (i > 0) {
      sub[i] = 0.5 * dlo;
      diag[i] += 0.5 * dlo;
    } else if (cb.odd) {
      diag[i] += 0.5 * dlo;
    }
    if (i + 1 < p) {
      const double dhi = normal::pdf(hi) * (a - hi);
      sup[i] = 0.5 * dhi;
      diag[i] += 0.5 * dhi;
    }
    rhs[i] = -ev.mass[i] * ev.gap[i];
  }
  // Thomas algorithm.
  for (std::size_t i = 1; i < p; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(p);
  x[p - 1] = rhs[p - 1] / diag[p - 1];
  for (std::size_t i = p - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

void lloyd_pass(HalfCodebook& cb, const Evaluation& ev) {
  for (std::size_t i = 0; i < cb.a.size(); ++i) cb.a[i] -= ev.gap[i];
}

}  // namespace

std::size_t ScalarQuantizer::cell(double x) const {
  return static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), x) - thresholds.begin());
}

double ScalarQuantizer::identity_distortion() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < levels; ++i) s.add(cell_mass[i] * codepoints[i] * codepoints[i]);
  return 1.0 - s.value();
}

std::vector<double> quantile_init(std::size_t k) {
  require(k >= 1, "quantile_init: level count must be positive");
  std::vector<double> out(k);
  const double scale = std::sqrt(3.0);
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t mirror = k + 1 - i;
    if (2 * i == k + 1) {
      out[i - 1] = 0.0;
    } else if (i < mirror) {
      out[i - 1] = scale * normal::quantile(static_cast<double>(i) / static_cast<double>(k + 1));
    } else {
      out[i - 1] = -out[mirror - 1];
    }
  }
  return out;
}

ScalarQuantizer lloyd_1d(std::size_t k, const LloydOptions& options) {
  require(k >= 1, "lloyd_1d: level count must be positive");
  require(options.tol > 0.0, "lloyd_1d: tolerance must be positive");

  ScalarQuantizer q;
  q.levels = k;
  if (k == 1) {
    q.codepoints = {0.0};
    q.cell_mass = {1.0};
    q.distortion = 1.0;
    return q;
  }

  HalfCodebook cb;
  cb.odd = (k % 2) == 1;
  {
    const auto init = quantile_init(k);
    cb.a.assign(init.end() - static_cast<std::ptrdiff_t>(k / 2), init.end());
  }

  std::size_t iter = 0;
  Evaluation ev = evaluate(cb);
  for (std::size_t pass = 0; pass < options.lloyd_passes && iter < options.max_iter && ev.residual >= options.tol;
       ++pass, ++iter) {
    lloyd_pass(cb, ev);
    ev = evaluate(cb);
  }

  while (ev.residual >= options.tol && iter < options.max_iter) {
    ++iter;
    const auto step = newton_step(cb, ev);
    const double base = merit(ev);
    bool accepted = false;
    for (double damp = 1.0; damp > 1e-12; damp *= 0.5) {
      HalfCodebook trial = cb;
      for (std::size_t i = 0; i < trial.a.size(); ++i) trial.a[i] += damp * step[i];
      if (!ordered(trial.a)) continue;
      Evaluation tev = evaluate(trial);
      if (merit(tev) < base || tev.residual < ev.residual) {
        cb = std::move(trial);
        ev = std::move(tev);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Newton stalled (rounding floor or poor curvature); a Lloyd pass never increases distortion.
      const double before = ev.residual;
      lloyd_pass(cb, ev);
      ev = evaluate(cb);
      if (!(ev.residual < before)) break;
    }
  }

  if (!(ev.residual < options.tol)) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "lloyd_1d(k=" << k << ") did not converge after " << iter << " iterations; residual " << ev.residual;
    fail(Errc::non_convergence, msg.str());
  }

  const std::size_t p = cb.a.size();
  q.iterations = iter;
  q.stationarity_residual = ev.residual;
  q.codepoints.resize(k);
  q.cell_mass.resize(k);
  q.thresholds.resize(k - 1);

  CompensatedSum dist;
  for (std::size_t i = 0; i < p; ++i) {
    const CellStats s = cell_stats(cb.lower(i), cb.upper(i), cb.a[i]);
    q.codepoints[k - p + i] = cb.a[i];
    q.codepoints[p - 1 - i] = -cb.a[i];
    q.cell_mass[k - p + i] = s.mass;
    q.cell_mass[p - 1 - i] = s.mass;
    dist.add(2.0 * s.error);
  }
  if (cb.odd) {
    const CellStats s = cell_stats(0.0, 0.5 * cb.a[0], 0.0);
    q.codepoints[p] = 0.0;
    q.cell_mass[p] = 2.0 * s.mass;
    dist.add(2.0 * s.error);
  }
  q.distortion = dist.value();
  for (std::size_t i = 0; i + 1 < k; ++i) q.thresholds[i] = 0.5 * (q.codepoints[i] + q.codepoints[i + 1]);
  return q;
}

double codebook_distortion(std::span<const double> codepoints) {
  require(!codepoints.empty(), "codebook_distortion: empty codebook");
  require(std::is_sorted(codepoints.begin(), codepoints.end()), "codebook_distortion: codebook must be sorted");
  CompensatedSum total;
  const std::size_t k = codepoints.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double a = codepoints[i];
    const double lo = i == 0 ? -kInf : 0.5 * (codepoints[i - 1] + a);
    const double hi = i + 1 == k ? kInf : 0.5 * (a + codepoints[i + 1]);
    if (!(hi > lo)) continue;
    // Split at zero so every piece sits on one half-line, then reflect the negative side.
    if (lo < 0.0) {
      const double nlo = hi < 0.0 ? -hi : 0.0;
      total.add(cell_stats(nlo, -lo, -a).error);
    }
    if (hi > 0.0) total.add(cell_stats(std::max(lo, 0.0), hi, a).error);
  }
  return total.value();
}

ScalarQuantizerCache::ScalarQuantizerCache(std::size_t full_limit, LloydOptions options)
    : full_limit_(full_limit), options_(options) {}

ScalarQuantizerCache& ScalarQuantizerCache::global() {
  static ScalarQuantizerCache cache;
  return cache;
}

std::shared_ptr<const ScalarQuantizer> ScalarQuantizerCache::quantizer(std::size_t k) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = quantizers_.find(k); it != quantizers_.end()) return it->second;
  }
  if (k > kMaxScalarLevels)
    fail(Errc::not_materializable, "scalar quantizer: " + std::to_string(k) + " levels exceed " + std::to_string(kMaxScalarLevels));
  auto q = std::make_shared<const ScalarQuantizer>(lloyd_1d(k, options_));
  std::unique_lock lock(mutex_);
  distortions_.emplace(k, q->distortion);
  if (k <= full_limit_) quantizers_.emplace(k, q);
  return q;
}

double ScalarQuantizerCache::distortion(std::size_t k) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = distortions_.find(k); it != distortions_.end()) return it->second;
  }
  return quantizer(k)->distortion;
}

void ScalarQuantizerCache::preload(std::size_t k, double distortion) {
  require(k >= 1 && distortion > 0.0 && distortion <= 1.0, "preload: invalid cached distortion");
  std::unique_lock lock(mutex_);
  distortions_.emplace(k, distortion);
}

std::map<std::size_t, double> ScalarQuantizerCache::distortions() const {
  std::shared_lock lock(mutex_);
  return distortions_;
}

std::vector<C1Row> c1_scan(std::size_t k_max, ScalarQuantizerCache& cache) {
  require(k_max >= 1, "c1_scan: k_max must be positive");
  std::vector<C1Row> rows;
  rows.reserve(k_max);
  double sup = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    C1Row row;
    row.k = k;
    try {
      const double kk = static_cast<double>(k);
      row.scaled = kk * kk * cache.distortion(k);
      sup = std::max(sup, row.scaled);
    } catch (const Error& e) {
      row.valid = false;
      row.error = e.what();
    }
    row.running_sup = sup;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fq
