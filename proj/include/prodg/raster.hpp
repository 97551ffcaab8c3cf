#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prodg/geometry.hpp"
#include "prodg/grammar.hpp"

namespace prodg {

/// 8-bit image, row-major, channels interleaved.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  Raster() = default;
  Raster(int w, int h, int c = 1, std::uint8_t fill = 0);

  Size size() const { return {width, height}; }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  friend bool operator==(const Raster&, const Raster&) = default;
};

/// Real intensities in [0,1], row-major.
struct RegionMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  RegionMatrix() = default;
  RegionMatrix(int m, int n, double fill = 0.0)
      : rows(m), cols(n), values(static_cast<std::size_t>(m) * n, fill) {}

  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return values.size(); }
};

/// (299 R + 587 G + 114 B) / 1000, rounded half up. Single-channel input is returned as is.
Raster to_luma(const Raster& image);

/// Each pixel takes the gray level of the terminal covering it.
Raster rasterize(const SymbolTree& tree, int width, int height);

/// Crop by the half-open pixel mapping, divided by 255. Throws
/// DegenerateRegionError when the region covers no pixel.
RegionMatrix extract_region(const Raster& raster, const Rect& region);
RegionMatrix extract_pixels(const Raster& raster, const PixelRect& rect);

struct CannyParams {
  double sigma = 1.4;
  int kernel_size = 5;
  /// On the 0-255 Sobel magnitude scale.
  double low_threshold = 100.0;
  double high_threshold = 200.0;
};

struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> gx;
  std::vector<double> gy;
  std::vector<double> magnitude;
};

/// Normalized 1-D Gaussian taps; kernel_size must be odd.
std::vector<double> gaussian_kernel(double sigma, int kernel_size);

/// Blur + Sobel stage of canny(), exposed for inspection.
GradientField canny_gradients(const Raster& image, const CannyParams& params);

/// Binary {0,255} edge map. Blur, Sobel, non-maximum suppression, double
/// threshold, 8-connected hysteresis. The 1-px border is never an edge.
Raster canny(const Raster& image, const CannyParams& params = {});

}  // namespace prodg
