#pragma once

// Shared fixtures and random generators for the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "prodg/editing.hpp"
#include "prodg/grammar.hpp"
#include "prodg/guidance.hpp"
#include "prodg/raster.hpp"

namespace prodg::test {

using Rng = std::mt19937_64;

inline ProcNode terminal(std::string category) { return ProcNode{std::move(category), Split::none, {}}; }

inline ProcNode split(std::string category, Split s, std::vector<std::pair<double, ProcNode>> kids) {
  ProcNode n{std::move(category), s, {}};
  for (auto& [w, k] : kids) n.children.push_back({w, std::move(k)});
  return n;
}

inline Procedure make_procedure(ProcNode root, Size size = {256, 256}) {
  Procedure p;
  p.image_size = size;
  p.categories = CategoryRegistry::builtin().find("default");
  p.root = std::move(root);
  validate(p);
  return p;
}

/// wall | middle | wall, split horizontally with weights 1:1:1.
inline ProcNode floor_row(const std::string& middle = "window") {
  return split("floor", Split::horizontal,
               {{1.0, terminal("wall")}, {1.0, terminal(middle)}, {1.0, terminal("wall")}});
}

/// Facade of `floors` identical window floors stacked top to bottom.
inline Procedure facade(int floors, Size size = {256, 256}) {
  std::vector<std::pair<double, ProcNode>> kids;
  for (int i = 0; i < floors; ++i) kids.emplace_back(1.0, floor_row());
  return make_procedure(split("facade", Split::vertical, std::move(kids)), size);
}

/// Roof on top, then window floors, then a ground floor with a door.
inline Procedure facade_with_door(int window_floors, Size size = {256, 256}) {
  std::vector<std::pair<double, ProcNode>> kids;
  kids.emplace_back(1.0, terminal("roof"));
  for (int i = 0; i < window_floors; ++i) kids.emplace_back(1.0, floor_row());
  kids.emplace_back(1.0, floor_row("door"));
  return make_procedure(split("facade", Split::vertical, std::move(kids)), size);
}

/// Floor region of `bays` repetitions of wall/window/wall (weights 1:2:1)
/// between two wall bands (weights 1:2:1 vertically).
inline ProcNode window_band_floor(int bays) {
  ProcNode row{"floor", Split::horizontal, {}};
  for (int i = 0; i < bays; ++i) {
    row.children.push_back({1.0, terminal("wall")});
    row.children.push_back({2.0, terminal("window")});
    row.children.push_back({1.0, terminal("wall")});
  }
  return split("floor", Split::vertical,
               {{1.0, terminal("wall")}, {2.0, std::move(row)}, {1.0, terminal("wall")}});
}

inline const std::vector<std::string>& terminal_names() {
  static const std::vector<std::string> names{"wall", "window", "door",  "balcony",
                                              "roof", "shop",   "sky",   "column"};
  return names;
}

/// Random valid node tree with at most `budget` nodes in total. Weights are
/// drawn from a small set of dyadic and non-dyadic values.
inline ProcNode random_node(Rng& rng, int& budget, int depth, int max_depth) {
  --budget;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool leaf = depth >= max_depth || budget < 2 || (depth > 0 && u(rng) < 0.35);
  if (leaf) {
    const auto& names = terminal_names();
    return terminal(names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)]);
  }
  ProcNode n{u(rng) < 0.5 ? "facade" : "floor", u(rng) < 0.5 ? Split::horizontal : Split::vertical,
             {}};
  const int want = std::uniform_int_distribution<int>(1, 4)(rng);
  static constexpr double kWeights[] = {1.0, 2.0, 0.5, 3.0, 0.3, 1.7, 25.0};
  for (int i = 0; i < want && (i == 0 || budget > 0); ++i) {
    const double w = kWeights[std::uniform_int_distribution<int>(0, 6)(rng)];
    n.children.push_back({w, random_node(rng, budget, depth + 1, max_depth)});
  }
  return n;
}

inline Procedure random_procedure(Rng& rng, int max_nodes = 50, int max_depth = 5) {
  int budget = max_nodes;
  ProcNode root = random_node(rng, budget, 0, max_depth);
  std::uniform_int_distribution<int> side(16, 1024);
  return make_procedure(std::move(root), {side(rng), side(rng)});
}

inline int count_nodes(const ProcNode& n) {
  int c = 1;
  for (const auto& ch : n.children) c += count_nodes(ch.node);
  return c;
}

/// Paths of every nonterminal node, root first.
inline void nonterminal_paths(const ProcNode& n, NodePath& cur, std::vector<NodePath>& out) {
  if (n.children.empty()) return;
  out.push_back(cur);
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    cur.push_back(i);
    nonterminal_paths(n.children[i].node, cur, out);
    cur.pop_back();
  }
}

/// A small random edit script that keeps the procedure valid and within
/// `max_nodes` nodes: reweights, repeat-count changes and terminal swaps.
inline std::vector<EditOp> random_edit(Rng& rng, const Procedure& p, int max_nodes = 50) {
  std::vector<NodePath> parents;
  NodePath cur;
  nonterminal_paths(p.root, cur, parents);
  std::vector<EditOp> ops;
  if (parents.empty()) return ops;
  Procedure work = p;
  const int n_ops = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int k = 0; k < n_ops; ++k) {
    parents.clear();
    cur.clear();
    nonterminal_paths(work.root, cur, parents);
    const NodePath& path = parents[std::uniform_int_distribution<std::size_t>(0, parents.size() - 1)(rng)];
    const ProcNode* node = &work.root;
    for (std::size_t i : path) node = &node->children[i].node;
    const std::size_t child =
        std::uniform_int_distribution<std::size_t>(0, node->children.size() - 1)(rng);
    EditOp op;
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: {
        op.path = path;
        op.path.push_back(child);
        op.payload = SetWeight{std::uniform_real_distribution<double>(0.2, 4.0)(rng)};
        break;
      }
      case 1: {
        op.path = path;
        const std::string& cat = node->children[child].node.category;
        const int size = count_nodes(node->children[child].node);
        const int room = std::max(1, (max_nodes - count_nodes(work.root)) / size + 1);
        op.payload = SetRepeatCount{
            cat, static_cast<std::size_t>(std::uniform_int_distribution<int>(1, std::min(room, 5))(rng)),
            std::nullopt};
        break;
      }
      default: {
        op.path = path;
        op.path.push_back(child);
        const auto& names = terminal_names();
        op.payload = ReplaceSubtree{
            terminal(names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)]),
            std::nullopt};
        break;
      }
    }
    Procedure next = apply_edits(work, {op});
    if (count_nodes(next.root) > max_nodes) continue;
    work = std::move(next);
    ops.push_back(std::move(op));
  }
  return ops;
}

inline RegionMatrix random_matrix(Rng& rng, int m, int n) {
  RegionMatrix a(m, n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : a.values) v = u(rng);
  return a;
}

inline Raster random_raster(Rng& rng, int w, int h, int channels = 1) {
  Raster r(w, h, channels);
  std::uniform_int_distribution<int> u(0, 255);
  for (auto& v : r.data) v = static_cast<std::uint8_t>(u(rng));
  return r;
}

inline ActivationGrid random_grid(Rng& rng, std::string name, int c, int h, int w) {
  ActivationGrid g(std::move(name), c, h, w);
  std::normal_distribution<float> n(0.0f, 3.0f);
  for (auto& v : g.data) v = n(rng);
  return g;
}

/// Synthetic "photo" of a procedure: its segmentation with mild texture so
/// edges carry more than the label boundaries.
inline Raster textured_photo(const SymbolTree& t, int w, int h, std::uint64_t seed) {
  Raster seg = rasterize(t, w, h);
  Raster rgb(w, h, 3);
  Rng rng(seed);
  std::uniform_int_distribution<int> noise(-6, 6);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        rgb.at(x, y, c) = static_cast<std::uint8_t>(
            std::clamp(seg.at(x, y) + 20 * c + noise(rng), 0, 255));
  return rgb;
}

/// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("prodg-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace prodg::test
