#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace prodg {

/// Axis-aligned rectangle in normalized image space; y grows downward.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Rect& o) const {
    return o.x0 >= x0 && o.y0 >= y0 && o.x1 <= x1 && o.y1 <= y1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

inline constexpr Rect kUnitSquare{0.0, 0.0, 1.0, 1.0};

struct Size {
  int width = 0;
  int height = 0;
  friend bool operator==(const Size&, const Size&) = default;
};

/// Half-open pixel rectangle [x0,x1) x [y0,y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  long long area() const { return empty() ? 0 : 1LL * width() * height(); }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

inline int to_pixel(double coord, int extent) {
  return std::clamp(static_cast<int>(std::floor(coord * extent)), 0, extent);
}

/// floor-based half-open mapping; adjacent rects sharing a boundary never overlap.
inline PixelRect to_pixels(const Rect& r, Size s) {
  return {to_pixel(r.x0, s.width), to_pixel(r.y0, s.height), to_pixel(r.x1, s.width),
          to_pixel(r.y1, s.height)};
}

/// Like to_pixels, but a rect thinner than one cell along an axis still gets one cell.
inline PixelRect to_pixels_collapsed(const Rect& r, Size s) {
  PixelRect p = to_pixels(r, s);
  if (p.x1 <= p.x0) {
    p.x0 = std::min(p.x0, s.width - 1);
    p.x1 = p.x0 + 1;
  }
  if (p.y1 <= p.y0) {
    p.y0 = std::min(p.y0, s.height - 1);
    p.y1 = p.y0 + 1;
  }
  return p;
}

}  // namespace prodg
