#pragma once

// Data-parallel inner loops. Every kernel exists twice with the same
// signature: `serial` is the plain reference, `parallel` is the OpenMP
// version used by the library. Both produce bit-identical output.

#include <cstddef>
#include <cstdint>
#include <span>

#include "prodg/geometry.hpp"

namespace prodg::kernels {

/// Row-major plane of doubles.
struct PlaneView {
  std::span<const double> data;
  int width = 0;
  int height = 0;
};

/// count x dim, row-major.
struct Points {
  std::span<const double> data;
  std::size_t count = 0;
  std::size_t dim = 0;
};

namespace serial {

/// Separable convolution with symmetric odd-length taps, replicate border.
void convolve_separable(PlaneView src, std::span<const double> taps, std::span<double> dst);
/// 3x3 Sobel, replicate border; magnitude = sqrt(gx^2 + gy^2).
void sobel(PlaneView src, std::span<double> gx, std::span<double> gy,
           std::span<double> magnitude);
/// Writes 0 (none), 1 (candidate, > low) or 2 (strong, > high) after
/// non-maximum suppression along the quantized gradient direction.
void suppress_non_maxima(PlaneView magnitude, std::span<const double> gx,
                         std::span<const double> gy, double low, double high,
                         std::span<std::uint8_t> classes);
/// Bilinear resample onto tw x th with pixel-centre alignment and clamped borders.
void resample_bilinear(PlaneView src, int tw, int th, std::span<double> dst);
/// Paints each rect with its value. Rects must be disjoint.
void fill_rects(std::span<std::uint8_t> image, int width, std::span<const PixelRect> rects,
                std::span<const std::uint8_t> values);
/// For each unit direction (dim doubles each): 1-D W2 between the projected sets.
void sliced_w2(Points a, Points b, std::span<const double> directions,
               std::span<double> per_direction);

}  // namespace serial

namespace parallel {

void convolve_separable(PlaneView src, std::span<const double> taps, std::span<double> dst);
void sobel(PlaneView src, std::span<double> gx, std::span<double> gy,
           std::span<double> magnitude);
void suppress_non_maxima(PlaneView magnitude, std::span<const double> gx,
                         std::span<const double> gy, double low, double high,
                         std::span<std::uint8_t> classes);
void resample_bilinear(PlaneView src, int tw, int th, std::span<double> dst);
void fill_rects(std::span<std::uint8_t> image, int width, std::span<const PixelRect> rects,
                std::span<const std::uint8_t> values);
void sliced_w2(Points a, Points b, std::span<const double> directions,
               std::span<double> per_direction);

}  // namespace parallel

/// Exact 1-D W2 between two sorted samples via their empirical quantile functions.
double w2_sorted(std::span<const double> a, std::span<const double> b);

/// Pairwise sum in fixed tree order.
double pairwise_sum(std::span<const double> values);

}  // namespace prodg::kernels
