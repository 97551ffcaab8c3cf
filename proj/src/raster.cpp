#include "prodg/raster.hpp"

#include <cmath>
#include <deque>

#include "prodg/error.hpp"
#include "prodg/kernels.hpp"

namespace prodg {

Raster::Raster(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {
  if (w < 1 || h < 1) throw Error("raster dimensions must be positive");
  if (c != 1 && c != 3) throw Error("raster must have 1 or 3 channels");
}

Raster to_luma(const Raster& image) {
  if (image.channels == 1) return image;
  Raster out(image.width, image.height, 1);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const unsigned r = image.data[3 * i], g = image.data[3 * i + 1], b = image.data[3 * i + 2];
    out.data[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

Raster rasterize(const SymbolTree& tree, int width, int height) {
  Raster out(width, height, 1);
  std::vector<PixelRect> rects;
  std::vector<std::uint8_t> values;
  for (SymbolId id : tree.terminals()) {
    rects.push_back(to_pixels(tree.at(id).region, out.size()));
    values.push_back(static_cast<std::uint8_t>(tree.gray_level(id)));
  }
  kernels::parallel::fill_rects(out.data, width, rects, values);
  return out;
}

RegionMatrix extract_pixels(const Raster& raster, const PixelRect& rect) {
  if (rect.empty()) throw DegenerateRegionError("region covers no pixel at this resolution");
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > raster.width || rect.y1 > raster.height)
    throw DegenerateRegionError("region outside the raster");
  const Raster gray = to_luma(raster);
  RegionMatrix m(rect.height(), rect.width());
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) m(y, x) = gray.at(rect.x0 + x, rect.y0 + y) / 255.0;
  return m;
}

RegionMatrix extract_region(const Raster& raster, const Rect& region) {
  return extract_pixels(raster, to_pixels(region, raster.size()));
}

std::vector<double> gaussian_kernel(double sigma, int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0) throw Error("kernel size must be odd");
  if (!(sigma > 0.0)) throw Error("sigma must be positive");
  const int r = kernel_size / 2;
  std::vector<double> taps(kernel_size);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    taps[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + r];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

GradientField canny_gradients(const Raster& image, const CannyParams& params) {
  const Raster gray = to_luma(image);
  const std::size_t n = gray.data.size();
  std::vector<double> src(gray.data.begin(), gray.data.end());
  std::vector<double> blurred(n);
  const auto taps = gaussian_kernel(params.sigma, params.kernel_size);
  kernels::parallel::convolve_separable({src, gray.width, gray.height}, taps, blurred);

  GradientField g{gray.width, gray.height, std::vector<double>(n), std::vector<double>(n),
                  std::vector<double>(n)};
  kernels::parallel::sobel({blurred, gray.width, gray.height}, g.gx, g.gy, g.magnitude);
  return g;
}

Raster canny(const Raster& image, const CannyParams& params) {
  if (!(params.low_threshold < params.high_threshold))
    throw Error("canny thresholds out of order: low must be below high");
  const GradientField g = canny_gradients(image, params);
  const int w = g.width, h = g.height;

  std::vector<std::uint8_t> classes(g.magnitude.size());
  kernels::parallel::suppress_non_maxima({g.magnitude, w, h}, g.gx, g.gy, params.low_threshold,
                                         params.high_threshold, classes);

  Raster out(w, h, 1);
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == 2) {
      out.data[i] = 255;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (classes[j] == 1 && out.data[j] == 0) {
          out.data[j] = 255;
          frontier.push_back(j);
        }
      }
    }
  }
  return out;
}

}  // namespace prodg
