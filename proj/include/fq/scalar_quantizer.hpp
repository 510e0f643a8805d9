#pragma once

// Optimal k-level quantizers for the standard normal law N(0,1).

#include <cstddef>
#include <map>
#include <numbers>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace fq {

/// lim k^2 e_k(N(0,1))^2 = sqrt(3) pi / 2, also the empirical supremum over k.
inline constexpr double kScalarLimit = std::numbers::sqrt3 * std::numbers::pi / 2.0;

/// Largest level count solved exactly; above it the solve is refused.
inline constexpr std::size_t kMaxScalarLevels = 2000000;

struct ScalarQuantizer {
  std::size_t levels = 0;
  std::vector<double> codepoints;  ///< strictly increasing, odd-symmetric
  std::vector<double> thresholds;  ///< the k-1 interior cell boundaries (midpoints)
  std::vector<double> cell_mass;   ///< Gaussian mass of each cell
  double distortion = 0.0;         ///< e_k(N(0,1))^2, integrated cell by cell
  double stationarity_residual = 0.0;
  std::size_t iterations = 0;

  std::size_t cell(double x) const;
  double quantize(double x) const { return codepoints[cell(x)]; }
  /// 1 - sum_i p_i a_i^2; equals the distortion at a centroidal codebook.
  double identity_distortion() const;
};

struct LloydOptions {
  double tol = 1e-12;            ///< on max_i |a_i - centroid_i|
  std::size_t max_iter = 100000; ///< Lloyd passes plus Newton steps
  std::size_t lloyd_passes = 8;  ///< plain Lloyd passes before Newton takes over
};

/// The i/(k+1)-quantiles of N(0,3), i = 1..k.
std::vector<double> quantile_init(std::size_t k);

/// Stationary symmetric k-level quantizer for N(0,1). Throws Errc::non_convergence.
ScalarQuantizer lloyd_1d(std::size_t k, const LloydOptions& options = {});

/// Mean squared nearest-neighbour error of N(0,1) for an arbitrary sorted codebook.
double codebook_distortion(std::span<const double> codepoints);

/// Process-wide memo of optimal scalar quantizers. Full quantizers are kept
/// for k <= full_limit; beyond it only the distortion is retained.
class ScalarQuantizerCache {
 public:
  explicit ScalarQuantizerCache(std::size_t full_limit = 2000, LloydOptions options = {});

  static ScalarQuantizerCache& global();

  std::shared_ptr<const ScalarQuantizer> quantizer(std::size_t k);
  double distortion(std::size_t k);
  std::size_t full_limit() const { return full_limit_; }

  /// Seeds a distortion value (e.g. from a disk cache); an existing entry wins.
  void preload(std::size_t k, double distortion);
  std::map<std::size_t, double> distortions() const;

 private:
  std::size_t full_limit_;
  LloydOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::size_t, std::shared_ptr<const ScalarQuantizer>> quantizers_;
  std::map<std::size_t, double> distortions_;
};

struct C1Row {
  std::size_t k = 0;
  double scaled = 0.0;       ///< k^2 e_k^2
  double running_sup = 0.0;  ///< max over valid rows so far
  bool valid = true;
  std::string error;
};

/// k^2 e_k(N(0,1))^2 for k = 1..k_max with its running supremum.
std::vector<C1Row> c1_scan(std::size_t k_max, ScalarQuantizerCache& cache = ScalarQuantizerCache::global());

}  // namespace fq
