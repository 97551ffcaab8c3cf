// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>

#include "oracles.hpp"
#include "prodg/editing.hpp"
#include "prodg/guidance.hpp"
#include "prodg/image_io.hpp"
#include "prodg/matching.hpp"
#include "prodg/pipeline.hpp"
#include "support.hpp"

using namespace prodg;
namespace fs = std::filesystem;

namespace {

/// Collects failure notes for one criterion.
class Check {
 public:
  void require(bool ok, const std::string& note) {
    if (!ok && notes_.size() < 5) notes_.push_back(note);
    failed_ = failed_ || !ok;
  }
  bool failed() const { return failed_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  bool failed_ = false;
  std::vector<std::string> notes_;
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  std::cout << (c.failed() ? "FAIL " : "PASS ") << name << '\n';
  for (const auto& n : c.notes()) std::cout << "    " << n << '\n';
  failures += c.failed();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

PairingList match_procedures(const Procedure& p, const Procedure& q, int res) {
  const SymbolTree a = expand(p), b = expand(q);
  return match_trees(a, b, rasterize(a, res, res), rasterize(b, res, res), {});
}

RegionMatrix floor_matrix(int bays, std::shared_ptr<const CategoryTable> table) {
  Procedure p = test::make_procedure(test::window_band_floor(bays), {80, 40});
  p.table_name.clear();
  p.categories = std::move(table);
  return extract_region(rasterize(expand(p), 80, 40), kUnitSquare);
}

void tail_identity(Check& c) {
  test::Rng rng(1001);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const RegionMatrix a = test::random_matrix(rng, 16, 16);
    const SvdSpectrum s = singular_values(a);
    const auto direct = oracle::direct_rank_mse_all(a);
    for (std::size_t n = 0; n < direct.size(); ++n)
      worst = std::max(worst, std::abs(direct[n] - tail_mse(s, n)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(worst < 1e-8, "max deviation " + std::to_string(worst));
  c.require(secs < 5.0, "runtime " + std::to_string(secs) + " s");
}

void repetition(Check& c) {
  const auto base = std::make_shared<const CategoryTable>(CategoryTable::default_table());
  std::vector<Category> lit(base->categories().begin(), base->categories().end());
  for (auto& cat : lit)
    if (cat.name == "wall") cat.gray_level = 240;
  const auto lit_table = std::make_shared<const CategoryTable>(CategoryTable(lit));
  for (const auto& table : {base, lit_table}) {
    const RegionMatrix four = floor_matrix(4, table), ten = floor_matrix(10, table);
    const double window = table->at("window").gray_level / 255.0;
    const auto window_pixels = [&](const RegionMatrix& m) {
      return std::count(m.values.begin(), m.values.end(), window);
    };
    c.require(window_pixels(four) == window_pixels(ten), "window coverage differs");
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const Complexity a = complexity(singular_values(four), eps);
      const Complexity b = complexity(singular_values(ten), eps);
      c.require(a.rank == b.rank, "C differs at eps " + std::to_string(eps));
      const double d = svd_distance(four, ten, eps);
      c.require(d < 0.05, "D_SVD " + std::to_string(d) + " at eps " + std::to_string(eps));
    }
  }
}

void metric_axioms(Check& c) {
  test::Rng rng(1002);
  std::vector<RegionMatrix> corpus;
  for (int i = 0; i < 25; ++i) {
    const SymbolTree t = expand(test::random_procedure(rng));
    const int w = 8 + static_cast<int>(rng() % 40), h = 8 + static_cast<int>(rng() % 40);
    corpus.push_back(extract_region(rasterize(t, w, h), kUnitSquare));
  }
  for (int i = 0; i < 25; ++i)
    corpus.push_back(extract_region(test::random_raster(rng, 4 + static_cast<int>(rng() % 30),
                                                        4 + static_cast<int>(rng() % 30)),
                                    kUnitSquare));
  const MetricConfig cfg;
  for (const auto& a : corpus) {
    c.require(svd_distance(a, a, cfg.epsilon) == 0.0, "D_SVD(a,a) != 0");
    c.require(hellinger_distance(a, a, cfg.histogram_bins) == 0.0, "D_H(a,a) != 0");
    c.require(combined_distance(a, a, cfg) == 0.0, "D(a,a) != 0");
    const double cp = structural_complexity(a, cfg.epsilon);
    const double frac = cp - std::floor(cp);
    c.require(frac >= 0.0 && frac < 1.0, "fractional part out of range");
    for (const auto& b : corpus) {
      const double h = hellinger_distance(a, b, cfg.histogram_bins);
      c.require(h >= 0.0 && h <= 1.0, "D_H out of [0,1]");
      c.require(h == hellinger_distance(b, a, cfg.histogram_bins), "D_H asymmetric");
      c.require(svd_distance(a, b, cfg.epsilon) == svd_distance(b, a, cfg.epsilon), "D_SVD asymmetric");
      c.require(combined_distance(a, b, cfg) == combined_distance(b, a, cfg), "D asymmetric");
    }
  }
}

void matching_oracle(Check& c) {
  test::Rng rng(1003);
  for (int i = 0; i < 200; ++i) {
    const Procedure p = test::random_procedure(rng, 50);
    const Procedure q = i % 2 ? apply_edits(p, test::random_edit(rng, p)) : test::random_procedure(rng, 50);
    const SymbolTree a = expand(p), b = expand(q);
    c.require(a.size() <= 50 && b.size() <= 50, "tree over 50 symbols");
    const Raster sa = rasterize(a, 64, 64), sb = rasterize(b, 64, 64);
    const PairingList list = match_trees(a, b, sa, sb, {});
    for (const auto& v : oracle::check_pairings(a, b, sa, sb, list))
      c.require(false, "pair " + std::to_string(i) + ": " + v);
  }
  for (int i = 0; i < 50; ++i) {
    const Procedure p = test::random_procedure(rng, 50);
    const PairingList list = match_procedures(p, p, 64);
    for (const auto& pr : list.pairings) {
      c.require(pr.in_symbol && *pr.in_symbol == pr.out_symbol, "identity twin missed");
      c.require(pr.score && *pr.score == 0.0, "identity score nonzero");
      c.require(pr.fallback_level == FallbackLevel::matched_as_child, "identity child constraint broken");
    }
  }
}

void guidance_identity(Check& c) {
  test::Rng rng(1004);
  for (int i = 0; i < 30; ++i) {
    const Procedure p = test::random_procedure(rng);
    const SymbolTree t = expand(p);
    const PairingList list = match_procedures(p, p, 64);
    const int w = 32 + static_cast<int>(rng() % 100), h = 32 + static_cast<int>(rng() % 100);
    const Raster c_in = canny(test::textured_photo(t, w, h, i));
    const CannyOut out = build_canny_out(c_in, list, c_in.size());
    c.require(out.canny == c_in, "C_out differs from C_in");
    c.require(std::all_of(out.coverage.data.begin(), out.coverage.data.end(), [](auto v) { return v == 1; }),
              "coverage not identically 1");
    const std::vector<ActivationGrid> psi{test::random_grid(rng, "a", 3, 32, 32),
                                          test::random_grid(rng, "b", 5, 8, 8)};
    const auto psi_out = build_activations_out(psi, list);
    for (std::size_t g = 0; g < psi.size(); ++g)
      for (std::size_t k = 0; k < psi[g].data.size(); ++k)
        c.require(std::abs(psi_out[g].data[k] - psi[g].data[k]) <= 1e-12, "psi_out differs");
  }
  // fully matched but not identical
  const Procedure p = test::facade(3);
  const Procedure q = apply_edits(p, {{{}, SetRepeatCount{"floor", 5, std::nullopt}}});
  const PairingList list = match_procedures(p, q, 96);
  c.require(list.unmatched_count() == 0, "floor edit left symbols unmatched");
  const CannyOut out = build_canny_out(Raster(96, 96), list, {96, 160});
  c.require(std::all_of(out.coverage.data.begin(), out.coverage.data.end(), [](auto v) { return v == 1; }),
            "coverage not identically 1 after floor edit");
}

void bilinear_contract(Check& c) {
  test::Rng rng(1005);
  for (int i = 0; i < 200; ++i) {
    const int sw = 1 + static_cast<int>(rng() % 50), sh = 1 + static_cast<int>(rng() % 50);
    const int tw = 1 + static_cast<int>(rng() % 120), th = 1 + static_cast<int>(rng() % 120);
    const double v = std::uniform_real_distribution<double>(0.0, 255.0)(rng);
    for (double x : resample_region(std::vector<double>(static_cast<std::size_t>(sw) * sh, v), sw, sh, tw, th))
      c.require(std::abs(x - v) <= 1e-9 * 255.0, "constant region changed");
  }
  for (int i = 0; i < 100; ++i) {
    const int sw = 2 + static_cast<int>(rng() % 40), tw = 1 + static_cast<int>(rng() % 120);
    const int edge = static_cast<int>(rng() % sw);
    std::vector<double> src(static_cast<std::size_t>(sw) * 2, 0.0);
    src[edge] = src[sw + edge] = 255.0;
    const auto dst = resample_region(src, sw, 2, tw, 3);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < tw; ++x)
        c.require(std::abs(dst[y * tw + x] - oracle::bilinear_one_edge(sw, tw, edge, x, 255.0)) <= 1.0,
                  "one-edge value off by more than one level");
  }
}

void swd(Check& c) {
  test::Rng rng(1006);
  PointSet raw{16, {}};
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200 * 16; ++i) raw.data.push_back(n(rng));
  const FeatureSet f = FeatureSet::normalized(raw);
  c.require(sliced_wasserstein(f, f) < 1e-9, "identical sets not near zero");

  const PointSet a{1, {0.0, 1.0}}, b{1, {2.0, 3.0}};
  c.require(sliced_wasserstein(a, b, 7, 3) == 2.0, "1-D translation not exact");

  PointSet raw2 = raw;
  for (auto& v : raw2.data) v += 0.1 * n(rng);
  const FeatureSet g = FeatureSet::normalized(raw2);
  const double r1 = sliced_wasserstein(f, g, 500, 42), r2 = sliced_wasserstein(f, g, 500, 42);
  c.require(std::memcmp(&r1, &r2, sizeof r1) == 0, "fixed seed not reproducible");
  c.require(kDefaultProjections == 500, "default projections");
  c.require(sliced_wasserstein(f, g) == sliced_wasserstein(f, g, 500, 0), "default arguments");
}

void determinism(Check& c) {
  test::TempDir dir("accept-run");
  const Procedure p = test::facade_with_door(2, {128, 128});
  write_text_file(dir / "p.json", serialize_procedure(p));
  write_text_file(dir / "e.json", R"([{"kind":"set_repeat_count","path":[],"category":"floor","count":4}])");
  write_png(dir / "photo.png", test::textured_photo(expand(p), 128, 128, 9));
  test::Rng rng(1007);
  write_act(dir / "psi.act", {test::random_grid(rng, "f", 4, 16, 16)});
  const std::string args = std::string("\"") + PRODG_CLI_PATH + "\" run --in \"" + (dir / "p.json").string() +
                           "\" --script \"" + (dir / "e.json").string() + "\" --image \"" +
                           (dir / "photo.png").string() + "\" --psi \"" + (dir / "psi.act").string() +
                           "\" --resolution 64 --out-dir ";
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = args + "\"" + (dir / sub).string() + "\" >/dev/null 2>&1";
    c.require(std::system(cmd.c_str()) == 0, std::string("run ") + sub + " failed");
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    ++files;
    c.require(slurp(e.path()) == slurp(dir / "b" / e.path().filename()),
              e.path().filename().string() + " differs");
  }
  std::size_t files_b = std::distance(fs::directory_iterator(dir / "b"), fs::directory_iterator());
  c.require(files == 11 && files_b == files, "artifact count " + std::to_string(files));
}

void round_trips(Check& c) {
  test::Rng rng(1008);
  for (int i = 0; i < 100; ++i) {
    const Procedure p = test::random_procedure(rng);
    const std::string text = serialize_procedure(p);
    const Procedure back = parse_procedure(text);
    c.require(serialize_procedure(back) == text, "procedure text changed");
    c.require(structurally_equal(p.root, back.root, 0.0) && back.image_size == p.image_size,
              "procedure content changed");
  }
  for (int i = 0; i < 100; ++i) {
    std::vector<ActivationGrid> grids;
    const int count = static_cast<int>(rng() % 4);
    for (int g = 0; g < count; ++g)
      grids.push_back(test::random_grid(rng, "grid" + std::to_string(g), 1 + static_cast<int>(rng() % 8),
                                        1 + static_cast<int>(rng() % 20), 1 + static_cast<int>(rng() % 20)));
    const std::string bytes = encode_act(grids);
    const auto back = decode_act(bytes);
    c.require(back == grids, ".act content changed");
    c.require(encode_act(back) == bytes, ".act bytes changed");
  }
}

}  // namespace

int main() {
  criterion("tail identity of the truncated SVD", tail_identity);
  criterion("repetition invariance of structural complexity", repetition);
  criterion("metric axioms", metric_axioms);
  criterion("matching agrees with the exhaustive oracle", matching_oracle);
  criterion("guidance identity and full coverage", guidance_identity);
  criterion("bilinear resampling contract", bilinear_contract);
  criterion("sliced Wasserstein distance", swd);
  criterion("pipeline determinism", determinism);
  criterion("procedure and .act round trips", round_trips);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria\n";
  return failures ? 1 : 0;
}
