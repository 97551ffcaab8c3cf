#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "prodg/raster.hpp"

namespace prodg {

struct SvdSpectrum {
  /// min(rows, cols) values, non-increasing, non-negative.
  std::vector<double> sigmas;
  int rows = 0;
  int cols = 0;
};

struct MetricConfig {
  double epsilon = 1e-3;
  double alpha = 1.0;
  double beta = 1.0;
  int histogram_bins = 256;

  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults.
  static MetricConfig from_json(const nlohmann::json& j);
  friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

/// Singular values only. Duplicate rows and columns are folded into weighted
/// representatives first (exact for the spectrum), then one-sided Jacobi runs
/// on the compressed matrix.
SvdSpectrum singular_values(const RegionMatrix& a);

/// MSE(A, A_n) = (1/MN) * sum_{i>n} sigma_i^2.
double tail_mse(const SvdSpectrum& s, std::size_t n);

struct Complexity {
  /// Smallest n whose tail MSE is below epsilon.
  int rank = 0;
  /// Tail MSE at `rank` divided by epsilon; in [0, 1).
  double residual = 0.0;
  double value() const { return rank + residual; }
};

Complexity complexity(const SvdSpectrum& s, double epsilon);
/// C'_eps(A) = C_eps(A) + MSE(A, A_C) / eps.
double structural_complexity(const RegionMatrix& a, double epsilon);
double svd_distance(const RegionMatrix& a, const RegionMatrix& b, double epsilon);

/// Integer bin counts over [0,1]; value v lands in min(floor(v * bins), bins - 1).
std::vector<std::uint64_t> intensity_histogram(const RegionMatrix& a, int bins);
double hellinger_distance(const RegionMatrix& a, const RegionMatrix& b, int bins);
double combined_distance(const RegionMatrix& a, const RegionMatrix& b, const MetricConfig& cfg);

/// Everything the distances need from one region, so a region can be scored
/// against many candidates after a single decomposition.
struct RegionSignature {
  double complexity = 0.0;
  std::vector<std::uint64_t> histogram;
  std::uint64_t pixel_count = 0;
};

struct DistanceBreakdown {
  double svd = 0.0;
  double hellinger = 0.0;
  double combined = 0.0;
};

RegionSignature region_signature(const RegionMatrix& a, const MetricConfig& cfg);
DistanceBreakdown signature_distance(const RegionSignature& a, const RegionSignature& b,
                                     const MetricConfig& cfg);
double hellinger_from_counts(const std::vector<std::uint64_t>& a, std::uint64_t total_a,
                             const std::vector<std::uint64_t>& b, std::uint64_t total_b);

// ------------------------------------------------------------ Sliced Wasserstein

/// count x dim points, row-major.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
};

/// Points with unit L2 norm (within 1e-6).
class FeatureSet {
 public:
  /// Scales every vector to unit length; throws on zero vectors.
  static FeatureSet normalized(PointSet raw);
  /// Checks the unit-norm invariant without modifying the data.
  static FeatureSet from_unit_vectors(PointSet points);

  const PointSet& points() const { return points_; }

 private:
  explicit FeatureSet(PointSet p) : points_(std::move(p)) {}
  PointSet points_;
};

inline constexpr std::size_t kDefaultProjections = 500;

/// Unit directions (n x dim, row-major) from std::mt19937_64 seeded with
/// `seed`: Marsaglia polar Gaussians, normalized.
std::vector<double> random_directions(std::size_t dim, std::size_t n, std::uint64_t seed);

/// Mean over random directions of the exact 1-D W2 between the projected
/// samples. Deterministic in `seed` regardless of thread count.
double sliced_wasserstein(const PointSet& a, const PointSet& b,
                          std::size_t n_projections = kDefaultProjections,
                          std::uint64_t seed = 0);
double sliced_wasserstein(const FeatureSet& a, const FeatureSet& b,
                          std::size_t n_projections = kDefaultProjections,
                          std::uint64_t seed = 0);

}  // namespace prodg
