#include <algorithm>
#include <cmath>
#include <numeric>

#include "prodg/metrics.hpp"

namespace prodg {

namespace {

/// Column-major working matrix: `count` columns of `length` doubles.
struct Columns {
  std::size_t length = 0;
  std::size_t count = 0;
  std::vector<double> data;

  double* col(std::size_t j) { return data.data() + j * length; }
  const double* col(std::size_t j) const { return data.data() + j * length; }
};

/// Groups identical rows of a row-major rows x cols matrix. Returns the
/// representative row index and multiplicity of each group; all-zero rows are dropped.
std::vector<std::pair<std::size_t, std::size_t>> group_rows(const std::vector<double>& m,
                                                            std::size_t rows, std::size_t cols) {
  const auto row = [&](std::size_t r) { return m.begin() + static_cast<std::ptrdiff_t>(r * cols); };
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(row(a), row(a) + static_cast<std::ptrdiff_t>(cols), row(b),
                                        row(b) + static_cast<std::ptrdiff_t>(cols));
  });
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < rows;) {
    std::size_t j = i + 1;
    while (j < rows && std::equal(row(order[i]), row(order[i]) + static_cast<std::ptrdiff_t>(cols),
                                  row(order[j])))
      ++j;
    const bool zero =
        std::all_of(row(order[i]), row(order[i]) + static_cast<std::ptrdiff_t>(cols),
                    [](double v) { return v == 0.0; });
    if (!zero) groups.emplace_back(order[i], j - i);
    i = j;
  }
  return groups;
}

/// Folds duplicate rows: A^T A = sum_groups m * r r^T = (D^1/2 R)^T (D^1/2 R).
std::vector<double> fold_rows(const std::vector<double>& m, std::size_t rows, std::size_t cols,
                              std::size_t& rows_out) {
  const auto groups = group_rows(m, rows, cols);
  std::vector<double> out(groups.size() * cols);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double scale = std::sqrt(static_cast<double>(groups[g].second));
    for (std::size_t c = 0; c < cols; ++c)
      out[g * cols + c] = scale * m[groups[g].first * cols + c];
  }
  rows_out = groups.size();
  return out;
}

std::vector<double> transpose(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
  std::vector<double> t(m.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = m[r * cols + c];
  return t;
}

/// Hestenes one-sided Jacobi: orthogonalizes the columns; their norms are the
/// singular values.
std::vector<double> jacobi_column_norms(Columns w) {
  constexpr double kTol = 1e-15;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < w.count; ++p) {
      for (std::size_t q = p + 1; q < w.count; ++q) {
        double* wp = w.col(p);
        double* wq = w.col(q);
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < w.length; ++i) {
          alpha += wp[i] * wp[i];
          beta += wq[i] * wq[i];
          gamma += wp[i] * wq[i];
        }
        if (gamma == 0.0 || std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < w.length; ++i) {
          const double a = wp[i], b = wq[i];
          wp[i] = c * a - s * b;
          wq[i] = s * a + c * b;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> norms(w.count);
  for (std::size_t j = 0; j < w.count; ++j) {
    const double* v = w.col(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.length; ++i) acc += v[i] * v[i];
    norms[j] = std::sqrt(acc);
  }
  return norms;
}

}  // namespace

SvdSpectrum singular_values(const RegionMatrix& a) {
  SvdSpectrum out;
  out.rows = a.rows;
  out.cols = a.cols;
  const std::size_t k = static_cast<std::size_t>(std::min(a.rows, a.cols));
  out.sigmas.assign(k, 0.0);

  std::size_t r = 0;
  std::vector<double> folded = fold_rows(a.values, a.rows, a.cols, r);
  // duplicate columns of the row-folded matrix fold the same way on its transpose
  std::vector<double> t = transpose(folded, r, a.cols);
  std::size_t c = 0;
  std::vector<double> both = fold_rows(t, a.cols, r, c);  // c x r, row-major
  if (c == 0 || r == 0) return out;

  // Jacobi over the shorter dimension: columns = min(c, r)
  Columns w;
  if (c <= r) {
    w = {r, c, std::move(both)};  // each row of `both` (length r) is a column
  } else {
    w = {c, r, transpose(both, c, r)};
  }
  std::vector<double> sig = jacobi_column_norms(std::move(w));
  std::sort(sig.begin(), sig.end(), std::greater<>());
  std::copy_n(sig.begin(), std::min(sig.size(), k), out.sigmas.begin());
  return out;
}

double tail_mse(const SvdSpectrum& s, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = s.sigmas.size(); i-- > n;) acc += s.sigmas[i] * s.sigmas[i];
  return acc / (static_cast<double>(s.rows) * static_cast<double>(s.cols));
}

Complexity complexity(const SvdSpectrum& s, double epsilon) {
  const std::size_t k = s.sigmas.size();
  const double mn = static_cast<double>(s.rows) * static_cast<double>(s.cols);
  // tails[n] = sum_{i >= n} sigma_i^2, accumulated from the smallest value up
  std::vector<double> tails(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) tails[i] = tails[i + 1] + s.sigmas[i] * s.sigmas[i];
  for (std::size_t n = 0; n <= k; ++n) {
    const double mse = tails[n] / mn;
    if (mse < epsilon) return {static_cast<int>(n), mse / epsilon};
  }
  return {static_cast<int>(k), 0.0};
}

}  // namespace prodg
