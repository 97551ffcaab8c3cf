#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "oracles.hpp"
#include "prodg/error.hpp"
#include "prodg/raster.hpp"
#include "support.hpp"

using namespace prodg;

namespace {

Raster step_image(int w, int h, int edge) {
  Raster r(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = edge; x < w; ++x) r.at(x, y) = 255;
  return r;
}

/// Canny from oracle gradients: angle-binned suppression and fixed-point
/// hysteresis.
Raster oracle_canny(const Raster& img, const CannyParams& p) {
  const auto g = oracle::canny_gradients(img, p.sigma, p.kernel_size);
  const int w = img.width, h = img.height;
  std::vector<int> cls(g.magnitude.size(), 0);
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = g.magnitude[i];
      if (m <= p.low_threshold) continue;
      double deg = std::atan2(g.gy[i], g.gx[i]) * 180.0 / std::numbers::pi;
      if (deg < 0) deg += 180.0;
      int dx, dy;
      if (deg < 22.5 || deg >= 157.5) dx = 1, dy = 0;
      else if (deg < 67.5) dx = 1, dy = 1;
      else if (deg < 112.5) dx = 0, dy = 1;
      else dx = -1, dy = 1;
      const double before = g.magnitude[(y - dy) * w + (x - dx)];
      const double after = g.magnitude[(y + dy) * w + (x + dx)];
      if (!(m > before && m >= after)) continue;
      cls[i] = m > p.high_threshold ? 2 : 1;
    }
  std::vector<int> on(cls.size(), 0);
  for (std::size_t i = 0; i < cls.size(); ++i) on[i] = cls[i] == 2;
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (on[i] || cls[i] != 1) continue;
        for (int dy = -1; dy <= 1 && !on[i]; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (on[ny * w + nx]) {
              on[i] = 1;
              changed = true;
              break;
            }
          }
      }
  }
  Raster out(w, h);
  for (std::size_t i = 0; i < on.size(); ++i) out.data[i] = on[i] ? 255 : 0;
  return out;
}

/// Smooth random blobs so gradients are well separated from ties.
Raster blob_image(test::Rng& rng, int w, int h) {
  Raster r(w, h, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Blob { double x, y, rad, val; };
  std::vector<Blob> blobs(6);
  for (auto& b : blobs) b = {u(rng) * w, u(rng) * h, 3 + u(rng) * w / 3, 40 + u(rng) * 200};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 20;
      for (const auto& b : blobs)
        if (std::hypot(x - b.x, y - b.y) < b.rad) v = b.val;
      for (int c = 0; c < 3; ++c)
        r.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(v + 7 * c + 4 * u(rng), 0.0, 255.0));
    }
  return r;
}

}  // namespace

TEST_SUITE("raster") {

TEST_CASE("single wall at 4x4") {
  const SymbolTree t = expand(test::make_procedure(test::terminal("wall")));
  const Raster r = rasterize(t, 4, 4);
  CHECK(r.data == std::vector<std::uint8_t>(16, 0));
  const SymbolTree s = expand(test::make_procedure(test::terminal("sky")));
  CHECK(rasterize(s, 4, 4).data == std::vector<std::uint8_t>(16, 170));
}

TEST_CASE("vertical roof/wall split at 4x4") {
  const SymbolTree t = expand(test::make_procedure(test::split(
      "facade", Split::vertical, {{1.0, test::terminal("roof")}, {1.0, test::terminal("wall")}})));
  const Raster r = rasterize(t, 4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) CHECK(r.at(x, y) == (y < 2 ? 113 : 0));
}

TEST_CASE("category pixel mass follows region areas") {
  const SymbolTree t = expand(test::facade_with_door(2));
  const int n = 64;
  const Raster r = rasterize(t, n, n);
  std::map<int, long long> counts;
  for (auto v : r.data) ++counts[v];
  std::map<int, double> expected;
  std::map<int, int> terminals_per_level;
  for (SymbolId id : t.terminals()) {
    expected[t.gray_level(id)] += t.at(id).region.area() * n * n;
    ++terminals_per_level[t.gray_level(id)];
  }
  long long total = 0;
  for (const auto& [level, area] : expected) {
    // each terminal can lose or gain at most one pixel row and column
    CHECK(std::abs(counts[level] - area) <= 2.0 * n * terminals_per_level[level]);
    total += counts[level];
  }
  CHECK(total == n * n);
}

TEST_CASE("terminal pixel counts sum to the image area") {
  test::Rng rng(31);
  for (int i = 0; i < 30; ++i) {
    const SymbolTree t = expand(test::random_procedure(rng));
    const int w = 8 + static_cast<int>(rng() % 120), h = 8 + static_cast<int>(rng() % 120);
    long long total = 0;
    for (SymbolId id : t.terminals()) total += to_pixels(t.at(id).region, {w, h}).area();
    CHECK(total == 1LL * w * h);
  }
}

TEST_CASE("region extraction") {
  const SymbolTree t = expand(test::facade_with_door(2));
  const Raster r = rasterize(t, 48, 40);
  SUBCASE("full image") {
    const RegionMatrix m = extract_region(r, kUnitSquare);
    REQUIRE(m.rows == 40);
    REQUIRE(m.cols == 48);
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 48; ++x) CHECK(m(y, x) == r.at(x, y) / 255.0);
  }
  SUBCASE("every terminal region is constant") {
    for (SymbolId id : t.terminals()) {
      const RegionMatrix m = extract_region(r, t.at(id).region);
      for (double v : m.values) CHECK(v == t.gray_level(id) / 255.0);
    }
  }
  SUBCASE("sub-pixel region") {
    const Raster small(8, 8);
    CHECK_THROWS_AS(extract_region(small, Rect{0.5, 0.0, 0.51, 1.0}), DegenerateRegionError);
  }
}

TEST_CASE("luma rounds half up") {
  Raster rgb(3, 1, 3);
  const std::uint8_t px[] = {255, 0, 0, 0, 255, 0, 10, 20, 30};
  std::copy(std::begin(px), std::end(px), rgb.data.begin());
  const Raster g = to_luma(rgb);
  CHECK(g.at(0, 0) == 76);   // 76.245
  CHECK(g.at(1, 0) == 150);  // 149.685
  CHECK(g.at(2, 0) == 18);   // 18.15
  Raster half(1, 1, 3);
  half.data = {0, 0, 50};    // 5.7
  CHECK(to_luma(half).at(0, 0) == 6);
  half.data = {5, 0, 0};     // 1.495
  CHECK(to_luma(half).at(0, 0) == 1);
}

TEST_CASE("canny on a constant image is empty") {
  const Raster r(40, 30, 1, 137);
  const Raster e = canny(r);
  CHECK(e.data == std::vector<std::uint8_t>(e.data.size(), 0));
}

TEST_CASE("canny on a vertical step gives one interior edge column") {
  const int w = 32, h = 20, edge = 16;
  const Raster img = step_image(w, h, edge);
  const Raster e = canny(img);
  const auto g = oracle::canny_gradients(img, 1.4, 5);
  const int row = h / 2;
  double peak = 0.0;
  for (int x = 0; x < w; ++x) peak = std::max(peak, g.magnitude[row * w + x]);

  std::vector<int> columns;
  for (int x = 0; x < w; ++x) {
    int on = 0;
    for (int y = 0; y < h; ++y) on += e.at(x, y) == 255;
    if (on > 0) {
      columns.push_back(x);
      CHECK(on == h - 2);
      CHECK(e.at(x, 0) == 0);
      CHECK(e.at(x, h - 1) == 0);
    }
  }
  REQUIRE(columns.size() == 1);
  CHECK(std::abs(g.magnitude[row * w + columns[0]] - peak) < 1e-9);
  CHECK((columns[0] == edge - 1 || columns[0] == edge));
}

TEST_CASE("canny rejects thresholds out of order") {
  CannyParams p;
  p.low_threshold = 200;
  p.high_threshold = 100;
  CHECK_THROWS_AS(canny(Raster(8, 8), p), Error);
  p.low_threshold = p.high_threshold = 100;
  CHECK_THROWS_AS(canny(Raster(8, 8), p), Error);
}

TEST_CASE("gradients agree with the direct 2-D oracle") {
  test::Rng rng(32);
  for (int i = 0; i < 6; ++i) {
    const Raster img = test::random_raster(rng, 17 + i * 5, 13 + i * 3, i % 2 ? 3 : 1);
    const GradientField g = canny_gradients(img, {});
    const auto o = oracle::canny_gradients(img, 1.4, 5);
    for (std::size_t k = 0; k < o.magnitude.size(); ++k) {
      CHECK(g.gx[k] == doctest::Approx(o.gx[k]).epsilon(1e-12).scale(255.0));
      CHECK(g.gy[k] == doctest::Approx(o.gy[k]).epsilon(1e-12).scale(255.0));
      CHECK(g.magnitude[k] == doctest::Approx(o.magnitude[k]).epsilon(1e-12).scale(255.0));
    }
  }
}

TEST_CASE("canny matches the reference pipeline on smooth shapes") {
  test::Rng rng(33);
  for (int i = 0; i < 8; ++i) {
    const Raster img = blob_image(rng, 64, 48);
    CannyParams p;
    p.low_threshold = 40 + 10 * i;
    p.high_threshold = 120 + 15 * i;
    CHECK(canny(img, p) == oracle_canny(img, p));
  }
}

TEST_CASE("canny output is binary and inside the low-threshold envelope") {
  test::Rng rng(34);
  for (int i = 0; i < 10; ++i) {
    const Raster img = test::random_raster(rng, 40, 40);
    const Raster e = canny(img, {});
    const GradientField g = canny_gradients(img, {});
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x) {
        const auto v = e.at(x, y);
        CHECK((v == 0 || v == 255));
        if (v != 255) continue;
        bool near = false;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = std::clamp(x + dx, 0, 39), ny = std::clamp(y + dy, 0, 39);
            near = near || g.magnitude[ny * 40 + nx] > 100.0;
          }
        CHECK(near);
      }
  }
}

TEST_CASE("gaussian kernel") {
  const auto k = gaussian_kernel(1.4, 5);
  REQUIRE(k.size() == 5);
  CHECK(k[0] == doctest::Approx(k[4]));
  CHECK(k[1] == doctest::Approx(k[3]));
  CHECK(k[2] > k[1]);
  CHECK(k[0] + k[1] + k[2] + k[3] + k[4] == doctest::Approx(1.0));
  CHECK_THROWS_AS(gaussian_kernel(1.4, 4), Error);
  CHECK_THROWS_AS(gaussian_kernel(0.0, 5), Error);
}

}  // TEST_SUITE
