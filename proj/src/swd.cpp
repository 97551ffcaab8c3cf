#include <cmath>
#include <random>

#include "prodg/error.hpp"
#include "prodg/kernels.hpp"
#include "prodg/metrics.hpp"

namespace prodg {

namespace {

double l2(const double* v, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t d = 0; d < dim; ++d) acc += v[d] * v[d];
  return std::sqrt(acc);
}

void check_shape(const PointSet& p, const char* which) {
  if (p.dim == 0 || p.data.empty() || p.data.size() % p.dim != 0)
    throw Error(std::string("point set ") + which + " is empty or ragged");
}

}  // namespace

FeatureSet FeatureSet::normalized(PointSet raw) {
  check_shape(raw, "to normalize");
  for (std::size_t i = 0; i < raw.count(); ++i) {
    double* v = raw.data.data() + i * raw.dim;
    const double n = l2(v, raw.dim);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error("cannot normalize a zero or non-finite vector");
    for (std::size_t d = 0; d < raw.dim; ++d) v[d] /= n;
  }
  return FeatureSet(std::move(raw));
}

FeatureSet FeatureSet::from_unit_vectors(PointSet points) {
  check_shape(points, "of features");
  for (std::size_t i = 0; i < points.count(); ++i)
    if (std::abs(l2(points.data.data() + i * points.dim, points.dim) - 1.0) > 1e-6)
      throw Error("feature vector " + std::to_string(i) + " is not unit length");
  return FeatureSet(std::move(points));
}

std::vector<double> random_directions(std::size_t dim, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53-bit uniform in (-1, 1)
  const auto uniform = [&] {
    return (static_cast<double>(rng() >> 11) + 0.5) * (2.0 / 9007199254740992.0) - 1.0;
  };
  std::vector<double> dirs(dim * n);
  for (std::size_t k = 0; k < n; ++k) {
    double* v = dirs.data() + k * dim;
    double norm = 0.0;
    do {
      for (std::size_t d = 0; d < dim; d += 2) {
        double u, w, s;
        do {
          u = uniform();
          w = uniform();
          s = u * u + w * w;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        v[d] = u * f;
        if (d + 1 < dim) v[d + 1] = w * f;
      }
      norm = l2(v, dim);
    } while (norm == 0.0);
    for (std::size_t d = 0; d < dim; ++d) v[d] /= norm;
  }
  return dirs;
}

double sliced_wasserstein(const PointSet& a, const PointSet& b, std::size_t n_projections,
                          std::uint64_t seed) {
  check_shape(a, "a");
  check_shape(b, "b");
  if (a.dim != b.dim)
    throw Error("dimension mismatch: " + std::to_string(a.dim) + " vs " + std::to_string(b.dim));
  if (n_projections == 0) throw Error("n_projections must be positive");
  const auto dirs = random_directions(a.dim, n_projections, seed);
  std::vector<double> per(n_projections);
  kernels::parallel::sliced_w2({a.data, a.count(), a.dim}, {b.data, b.count(), b.dim}, dirs, per);
  return kernels::pairwise_sum(per) / static_cast<double>(n_projections);
}

double sliced_wasserstein(const FeatureSet& a, const FeatureSet& b, std::size_t n_projections,
                          std::uint64_t seed) {
  return sliced_wasserstein(a.points(), b.points(), n_projections, seed);
}

}  // namespace prodg
