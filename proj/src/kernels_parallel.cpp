#include "kernel_detail.hpp"
#include "prodg/kernels.hpp"

namespace prodg::kernels::parallel {

void convolve_separable(PlaneView src, std::span<const double> taps, std::span<double> dst) {
  std::vector<double> tmp(src.data.size());
  const int w = src.width, h = src.height;
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        tmp[static_cast<std::size_t>(y) * w + x] = detail::convolve_row_at(src, taps, x, y);
    const PlaneView mid{tmp, w, h};
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        dst[static_cast<std::size_t>(y) * w + x] = detail::convolve_col_at(mid, taps, x, y);
  }
}

void sobel(PlaneView src, std::span<double> gx, std::span<double> gy,
           std::span<double> magnitude) {
  const int w = src.width, h = src.height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto s = detail::sobel_at(src, x, y);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      gx[i] = s.gx;
      gy[i] = s.gy;
      magnitude[i] = s.magnitude;
    }
  }
}

void suppress_non_maxima(PlaneView magnitude, std::span<const double> gx,
                         std::span<const double> gy, double low, double high,
                         std::span<std::uint8_t> classes) {
  const int w = magnitude.width, h = magnitude.height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      classes[static_cast<std::size_t>(y) * w + x] =
          detail::nms_class_at(magnitude, gx, gy, low, high, x, y);
}

void resample_bilinear(PlaneView src, int tw, int th, std::span<double> dst) {
#pragma omp parallel for schedule(static) if (static_cast<long long>(tw) * th > 4096)
  for (int y = 0; y < th; ++y)
    for (int x = 0; x < tw; ++x)
      dst[static_cast<std::size_t>(y) * tw + x] = detail::bilinear_at(src, tw, th, x, y);
}

void fill_rects(std::span<std::uint8_t> image, int width, std::span<const PixelRect> rects,
                std::span<const std::uint8_t> values) {
  const long long n = static_cast<long long>(rects.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long r = 0; r < n; ++r) {
    const PixelRect& pr = rects[r];
    for (int y = pr.y0; y < pr.y1; ++y)
      for (int x = pr.x0; x < pr.x1; ++x)
        image[static_cast<std::size_t>(y) * width + x] = values[r];
  }
}

void sliced_w2(Points a, Points b, std::span<const double> directions,
               std::span<double> per_direction) {
  const long long n = static_cast<long long>(per_direction.size());
#pragma omp parallel
  {
    std::vector<double> pa, pb;
#pragma omp for schedule(static)
    for (long long k = 0; k < n; ++k)
      per_direction[k] = detail::w2_for_direction(
          a, b, directions.subspan(static_cast<std::size_t>(k) * a.dim, a.dim), pa, pb);
  }
}

}  // namespace prodg::kernels::parallel
