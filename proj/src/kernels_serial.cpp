#include <numeric>

#include "kernel_detail.hpp"
#include "prodg/kernels.hpp"

namespace prodg::kernels {

double w2_sorted(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return 0.0;
  // quantile breakpoints i/n and j/m compared on the common grid 1/(n*m)
  std::size_t i = 0, j = 0, prev = 0;
  double acc = 0.0;
  while (i < n && j < m) {
    const std::size_t next_a = (i + 1) * m;
    const std::size_t next_b = (j + 1) * n;
    const std::size_t next = std::min(next_a, next_b);
    const double d = a[i] - b[j];
    acc += static_cast<double>(next - prev) * d * d;
    prev = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return std::sqrt(acc / (static_cast<double>(n) * static_cast<double>(m)));
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace serial {

void convolve_separable(PlaneView src, std::span<const double> taps, std::span<double> dst) {
  std::vector<double> tmp(src.data.size());
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      tmp[static_cast<std::size_t>(y) * src.width + x] = detail::convolve_row_at(src, taps, x, y);
  const PlaneView mid{tmp, src.width, src.height};
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x)
      dst[static_cast<std::size_t>(y) * src.width + x] = detail::convolve_col_at(mid, taps, x, y);
}

void sobel(PlaneView src, std::span<double> gx, std::span<double> gy,
           std::span<double> magnitude) {
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const auto s = detail::sobel_at(src, x, y);
      const std::size_t i = static_cast<std::size_t>(y) * src.width + x;
      gx[i] = s.gx;
      gy[i] = s.gy;
      magnitude[i] = s.magnitude;
    }
  }
}

void suppress_non_maxima(PlaneView magnitude, std::span<const double> gx,
                         std::span<const double> gy, double low, double high,
                         std::span<std::uint8_t> classes) {
  for (int y = 0; y < magnitude.height; ++y)
    for (int x = 0; x < magnitude.width; ++x)
      classes[static_cast<std::size_t>(y) * magnitude.width + x] =
          detail::nms_class_at(magnitude, gx, gy, low, high, x, y);
}

void resample_bilinear(PlaneView src, int tw, int th, std::span<double> dst) {
  for (int y = 0; y < th; ++y)
    for (int x = 0; x < tw; ++x)
      dst[static_cast<std::size_t>(y) * tw + x] = detail::bilinear_at(src, tw, th, x, y);
}

void fill_rects(std::span<std::uint8_t> image, int width, std::span<const PixelRect> rects,
                std::span<const std::uint8_t> values) {
  for (std::size_t r = 0; r < rects.size(); ++r) {
    const PixelRect& pr = rects[r];
    for (int y = pr.y0; y < pr.y1; ++y)
      for (int x = pr.x0; x < pr.x1; ++x)
        image[static_cast<std::size_t>(y) * width + x] = values[r];
  }
}

void sliced_w2(Points a, Points b, std::span<const double> directions,
               std::span<double> per_direction) {
  std::vector<double> pa, pb;
  for (std::size_t k = 0; k < per_direction.size(); ++k)
    per_direction[k] =
        detail::w2_for_direction(a, b, directions.subspan(k * a.dim, a.dim), pa, pb);
}

}  // namespace serial
}  // namespace prodg::kernels
