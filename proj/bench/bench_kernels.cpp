// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary the team.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "prodg/kernels.hpp"
#include "prodg/metrics.hpp"
#include "prodg/raster.hpp"

namespace {

using namespace prodg;
namespace ks = prodg::kernels::serial;
namespace kp = prodg::kernels::parallel;

std::vector<double> plane(int w, int h) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = u(rng);
  return v;
}

template <bool Parallel>
void convolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto src = plane(n, n);
  const auto taps = gaussian_kernel(1.4, 5);
  std::vector<double> dst(src.size());
  for (auto _ : state) {
    if constexpr (Parallel) kp::convolve_separable({src, n, n}, taps, dst);
    else ks::convolve_separable({src, n, n}, taps, dst);
    benchmark::DoNotOptimize(dst.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

template <bool Parallel>
void sobel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto src = plane(n, n);
  std::vector<double> gx(src.size()), gy(src.size()), m(src.size());
  for (auto _ : state) {
    if constexpr (Parallel) kp::sobel({src, n, n}, gx, gy, m);
    else ks::sobel({src, n, n}, gx, gy, m);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

template <bool Parallel>
void resample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto src = plane(n, n);
  std::vector<double> dst(static_cast<std::size_t>(2 * n) * 2 * n);
  for (auto _ : state) {
    if constexpr (Parallel) kp::resample_bilinear({src, n, n}, 2 * n, 2 * n, dst);
    else ks::resample_bilinear({src, n, n}, 2 * n, 2 * n, dst);
    benchmark::DoNotOptimize(dst.data());
  }
  state.SetItemsProcessed(state.iterations() * 4 * n * n);
}

template <bool Parallel>
void sliced(benchmark::State& state) {
  const std::size_t dim = 64, count = static_cast<std::size_t>(state.range(0));
  const auto a = plane(static_cast<int>(dim), static_cast<int>(count));
  const auto b = plane(static_cast<int>(dim), static_cast<int>(count));
  const auto dirs = random_directions(dim, kDefaultProjections, 0);
  std::vector<double> out(kDefaultProjections);
  for (auto _ : state) {
    if constexpr (Parallel) kp::sliced_w2({a, count, dim}, {b, count, dim}, dirs, out);
    else ks::sliced_w2({a, count, dim}, {b, count, dim}, dirs, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void canny_full(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  Raster img(n, n, 3);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng());
  for (auto _ : state) benchmark::DoNotOptimize(canny(img).data.data());
}

}  // namespace

BENCHMARK(convolve<false>)->Arg(256)->Arg(1024);
BENCHMARK(convolve<true>)->Arg(256)->Arg(1024);
BENCHMARK(sobel<false>)->Arg(256)->Arg(1024);
BENCHMARK(sobel<true>)->Arg(256)->Arg(1024);
BENCHMARK(resample<false>)->Arg(128)->Arg(512);
BENCHMARK(resample<true>)->Arg(128)->Arg(512);
BENCHMARK(sliced<false>)->Arg(256)->Arg(1024);
BENCHMARK(sliced<true>)->Arg(256)->Arg(1024);
BENCHMARK(canny_full)->Arg(512);

BENCHMARK_MAIN();
