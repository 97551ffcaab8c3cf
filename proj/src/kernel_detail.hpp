#pragma once

// Per-element arithmetic shared by the serial and parallel kernels, so both
// evaluate every output with the same expression.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "prodg/kernels.hpp"

namespace prodg::kernels::detail {

inline double at_clamped(PlaneView p, int x, int y) {
  x = std::clamp(x, 0, p.width - 1);
  y = std::clamp(y, 0, p.height - 1);
  return p.data[static_cast<std::size_t>(y) * p.width + x];
}

inline double convolve_row_at(PlaneView p, std::span<const double> taps, int x, int y) {
  const int r = static_cast<int>(taps.size() / 2);
  double acc = 0.0;
  for (int k = -r; k <= r; ++k) acc += taps[k + r] * at_clamped(p, x + k, y);
  return acc;
}

inline double convolve_col_at(PlaneView p, std::span<const double> taps, int x, int y) {
  const int r = static_cast<int>(taps.size() / 2);
  double acc = 0.0;
  for (int k = -r; k <= r; ++k) acc += taps[k + r] * at_clamped(p, x, y + k);
  return acc;
}

struct SobelAt {
  double gx, gy, magnitude;
};

inline SobelAt sobel_at(PlaneView p, int x, int y) {
  const double a = at_clamped(p, x - 1, y - 1), b = at_clamped(p, x, y - 1),
               c = at_clamped(p, x + 1, y - 1);
  const double d = at_clamped(p, x - 1, y), f = at_clamped(p, x + 1, y);
  const double g = at_clamped(p, x - 1, y + 1), h = at_clamped(p, x, y + 1),
               i = at_clamped(p, x + 1, y + 1);
  const double gx = (c + 2.0 * f + i) - (a + 2.0 * d + g);
  const double gy = (g + 2.0 * h + i) - (a + 2.0 * b + c);
  return {gx, gy, std::sqrt(gx * gx + gy * gy)};
}

inline std::uint8_t nms_class_at(PlaneView mag, std::span<const double> gx,
                                 std::span<const double> gy, double low, double high, int x,
                                 int y) {
  if (x <= 0 || y <= 0 || x >= mag.width - 1 || y >= mag.height - 1) return 0;
  const std::size_t idx = static_cast<std::size_t>(y) * mag.width + x;
  const double m = mag.data[idx];
  if (!(m > low)) return 0;
  constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
  constexpr double kTan67 = 2.414213562373095;    // tan(67.5 deg)
  const double ax = std::abs(gx[idx]);
  const double ay = std::abs(gy[idx]);
  int dx, dy;
  if (ay <= ax * kTan22) {
    dx = 1, dy = 0;
  } else if (ay > ax * kTan67) {
    dx = 0, dy = 1;
  } else {
    dx = 1;
    dy = (gx[idx] * gy[idx] > 0.0) ? 1 : -1;
  }
  const double before = at_clamped(mag, x - dx, y - dy);
  const double after = at_clamped(mag, x + dx, y + dy);
  if (!(m > before && m >= after)) return 0;
  return m > high ? 2 : 1;
}

inline double bilinear_at(PlaneView src, int tw, int th, int tx, int ty) {
  double sx = (tx + 0.5) * src.width / tw - 0.5;
  double sy = (ty + 0.5) * src.height / th - 0.5;
  sx = std::clamp(sx, 0.0, static_cast<double>(src.width - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(src.height - 1));
  const int x0 = static_cast<int>(sx);
  const int y0 = static_cast<int>(sy);
  const int x1 = std::min(x0 + 1, src.width - 1);
  const int y1 = std::min(y0 + 1, src.height - 1);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const auto v = [&](int x, int y) { return src.data[static_cast<std::size_t>(y) * src.width + x]; };
  // a + t * (b - a) reproduces constants exactly
  const auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
  const double top = lerp(v(x0, y0), v(x1, y0), fx);
  const double bottom = lerp(v(x0, y1), v(x1, y1), fx);
  return lerp(top, bottom, fy);
}

inline void project(Points pts, std::span<const double> dir, std::vector<double>& out) {
  out.resize(pts.count);
  for (std::size_t i = 0; i < pts.count; ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < pts.dim; ++d) acc += pts.data[i * pts.dim + d] * dir[d];
    out[i] = acc;
  }
}

inline double w2_for_direction(Points a, Points b, std::span<const double> dir,
                               std::vector<double>& pa, std::vector<double>& pb) {
  project(a, dir, pa);
  project(b, dir, pb);
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  return w2_sorted(pa, pb);
}

}  // namespace prodg::kernels::detail
