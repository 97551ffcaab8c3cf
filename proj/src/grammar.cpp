#include "prodg/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "prodg/error.hpp"

namespace prodg {

namespace {

constexpr int kMaxDepth = 256;

CategoryKind kind_from_string(const std::string& s) {
  if (s == "terminal") return CategoryKind::terminal;
  if (s == "nonterminal") return CategoryKind::nonterminal;
  throw SchemaError("category kind must be \"terminal\" or \"nonterminal\", got \"" + s + "\"");
}

const char* to_string(CategoryKind k) {
  return k == CategoryKind::terminal ? "terminal" : "nonterminal";
}

void validate_node(const ProcNode& node, const CategoryTable& table, int depth,
                   const std::string& path) {
  if (depth > kMaxDepth) throw SchemaError("procedure deeper than 256 levels at " + path);
  const Category* cat = table.find(node.category);
  if (!cat) throw SchemaError("unknown category \"" + node.category + "\" at " + path);
  if (cat->terminal()) {
    if (!node.children.empty())
      throw SchemaError("terminal \"" + node.category + "\" has children at " + path);
    if (node.split != Split::none)
      throw SchemaError("terminal \"" + node.category + "\" has a split at " + path);
    return;
  }
  if (node.split == Split::none)
    throw SchemaError("nonterminal \"" + node.category + "\" has no split at " + path);
  if (node.children.empty())
    throw SchemaError("nonterminal \"" + node.category + "\" has no children at " + path);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const double w = node.children[i].weight;
    const std::string child_path = path + "/" + std::to_string(i);
    if (!std::isfinite(w) || w <= 0.0)
      throw SchemaError("non-positive or non-finite weight at " + child_path);
    validate_node(node.children[i].node, table, depth + 1, child_path);
  }
}

json node_to_json(const ProcNode& node) {
  json j;
  j["category"] = node.category;
  j["split"] = node.split == Split::none ? json(nullptr) : json(to_string(node.split));
  json children = json::array();
  for (const auto& c : node.children) {
    json cj = node_to_json(c.node);
    cj["weight"] = c.weight;
    children.push_back(std::move(cj));
  }
  j["children"] = std::move(children);
  return j;
}

ProcNode node_from_json(const json& j, bool is_child, double* weight_out, int depth,
                        const std::string& path) {
  if (depth > kMaxDepth) throw SchemaError("procedure deeper than 256 levels at " + path);
  if (!j.is_object()) throw SchemaError("node must be an object at " + path);
  ProcNode node;
  for (const auto& [key, value] : j.items()) {
    if (key == "category") {
      if (!value.is_string()) throw SchemaError("category must be a string at " + path);
      node.category = value.get<std::string>();
    } else if (key == "split") {
      if (value.is_null()) {
        node.split = Split::none;
      } else if (value.is_string()) {
        node.split = split_from_string(value.get<std::string>());
      } else {
        throw SchemaError("split must be \"h\", \"v\" or null at " + path);
      }
    } else if (key == "children") {
      if (!value.is_array()) throw SchemaError("children must be an array at " + path);
      for (std::size_t i = 0; i < value.size(); ++i) {
        double w = 0.0;
        ProcNode child =
            node_from_json(value[i], true, &w, depth + 1, path + "/" + std::to_string(i));
        node.children.push_back({w, std::move(child)});
      }
    } else if (key == "weight" && is_child) {
      if (!value.is_number()) throw SchemaError("weight must be a number at " + path);
      *weight_out = value.get<double>();
    } else {
      throw SchemaError("unexpected key \"" + key + "\" at " + path);
    }
  }
  if (node.category.empty()) throw SchemaError("missing category at " + path);
  if (is_child && !j.contains("weight")) throw SchemaError("missing weight at " + path);
  return node;
}

std::shared_ptr<const CategoryTable> resolve_table(const json& spec,
                                                   const CategoryRegistry& registry,
                                                   std::string& name_out) {
  if (spec.is_null()) {
    name_out = "default";
    return registry.find("default");
  }
  if (spec.is_string()) {
    name_out = spec.get<std::string>();
    auto table = registry.find(name_out);
    if (!table) throw SchemaError("unknown category table \"" + name_out + "\"");
    return table;
  }
  name_out.clear();
  return std::make_shared<const CategoryTable>(CategoryTable::from_json(spec));
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("syntax error: ") + e.what(), e.byte);
  }
}

}  // namespace

// ---------------------------------------------------------------- categories

CategoryTable::CategoryTable(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  std::set<std::string> names;
  std::set<int> grays;
  for (const auto& c : categories_) {
    if (c.name.empty()) throw SchemaError("empty category name");
    if (c.gray_level < 0 || c.gray_level > 255)
      throw SchemaError("gray level of \"" + c.name + "\" outside 0..255");
    if (!names.insert(c.name).second) throw SchemaError("duplicate category \"" + c.name + "\"");
    if (!grays.insert(c.gray_level).second)
      throw SchemaError("duplicate gray level " + std::to_string(c.gray_level));
  }
}

CategoryTable CategoryTable::default_table() {
  const std::pair<const char*, CategoryKind> entries[] = {
      {"wall", CategoryKind::terminal},      {"window", CategoryKind::terminal},
      {"door", CategoryKind::terminal},      {"balcony", CategoryKind::terminal},
      {"roof", CategoryKind::terminal},      {"shop", CategoryKind::terminal},
      {"sky", CategoryKind::terminal},       {"facade", CategoryKind::nonterminal},
      {"floor", CategoryKind::nonterminal},  {"column", CategoryKind::terminal},
  };
  constexpr int n = static_cast<int>(std::size(entries));
  std::vector<Category> cats;
  for (int i = 0; i < n; ++i)
    cats.push_back({entries[i].first, entries[i].second, (i * 255 + (n - 1) / 2) / (n - 1)});
  return CategoryTable(std::move(cats));
}

CategoryTable CategoryTable::from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("category table must be an array");
  std::vector<Category> cats;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("name") || !e.contains("kind") || !e.contains("gray_level"))
      throw SchemaError("category entries need name, kind and gray_level");
    if (!e["name"].is_string() || !e["kind"].is_string() || !e["gray_level"].is_number_integer())
      throw SchemaError("malformed category entry");
    cats.push_back({e["name"].get<std::string>(), kind_from_string(e["kind"].get<std::string>()),
                    e["gray_level"].get<int>()});
  }
  return CategoryTable(std::move(cats));
}

const Category* CategoryTable::find(std::string_view name) const {
  for (const auto& c : categories_)
    if (c.name == name) return &c;
  return nullptr;
}

const Category& CategoryTable::at(std::string_view name) const {
  if (const Category* c = find(name)) return *c;
  throw SchemaError("unknown category \"" + std::string(name) + "\"");
}

const Category* CategoryTable::find_by_gray(int gray_level) const {
  for (const auto& c : categories_)
    if (c.gray_level == gray_level) return &c;
  return nullptr;
}

json CategoryTable::to_json() const {
  json arr = json::array();
  for (const auto& c : categories_)
    arr.push_back({{"name", c.name}, {"kind", to_string(c.kind)}, {"gray_level", c.gray_level}});
  return arr;
}

CategoryRegistry::CategoryRegistry() { add("default", CategoryTable::default_table()); }

const CategoryRegistry& CategoryRegistry::builtin() {
  static const CategoryRegistry registry;
  return registry;
}

void CategoryRegistry::add(std::string name, CategoryTable table) {
  tables_[std::move(name)] = std::make_shared<const CategoryTable>(std::move(table));
}

std::shared_ptr<const CategoryTable> CategoryRegistry::find(std::string_view name) const {
  auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : it->second;
}

// ---------------------------------------------------------------- procedures

Split split_from_string(std::string_view s) {
  if (s == "h") return Split::horizontal;
  if (s == "v") return Split::vertical;
  throw SchemaError("split must be \"h\", \"v\" or null, got \"" + std::string(s) + "\"");
}

const char* to_string(Split s) {
  switch (s) {
    case Split::horizontal: return "h";
    case Split::vertical: return "v";
    case Split::none: break;
  }
  return "none";
}

void validate(const Procedure& proc) {
  if (!proc.categories) throw SchemaError("procedure has no category table");
  if (proc.image_size.width < 1 || proc.image_size.height < 1)
    throw SchemaError("image_size must be positive");
  validate_node(proc.root, *proc.categories, 0, "root");
}

Procedure procedure_from_json(const json& doc, const CategoryRegistry& registry) {
  if (!doc.is_object()) throw SchemaError("procedure document must be an object");
  for (const auto& [key, value] : doc.items())
    if (key != "image_size" && key != "categories" && key != "root")
      throw SchemaError("unexpected top-level key \"" + key + "\"");

  Procedure proc;
  if (!doc.contains("image_size")) throw SchemaError("missing image_size");
  const json& size = doc["image_size"];
  if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
      !size[1].is_number_integer())
    throw SchemaError("image_size must be [W, H] integers");
  proc.image_size = {size[0].get<int>(), size[1].get<int>()};

  proc.categories = resolve_table(doc.value("categories", json()), registry, proc.table_name);

  if (!doc.contains("root")) throw SchemaError("missing root");
  proc.root = node_from_json(doc["root"], false, nullptr, 0, "root");
  validate(proc);
  return proc;
}

json proc_node_to_json(const ProcNode& node) { return node_to_json(node); }

ProcNode proc_node_from_json(const json& j) { return node_from_json(j, false, nullptr, 0, "node"); }

Procedure parse_procedure(std::string_view text, const CategoryRegistry& registry) {
  return procedure_from_json(parse_json_text(text), registry);
}

json procedure_to_json(const Procedure& proc) {
  json j;
  j["image_size"] = {proc.image_size.width, proc.image_size.height};
  j["categories"] = proc.table_name.empty() ? proc.categories->to_json() : json(proc.table_name);
  j["root"] = node_to_json(proc.root);
  return j;
}

std::string serialize_procedure(const Procedure& proc) {
  return procedure_to_json(proc).dump(2) + "\n";
}

std::vector<double> split_boundaries(std::span<const double> weights, double lo, double hi) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> b(weights.size() + 1);
  b[0] = lo;
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cum += weights[i];
    b[i + 1] = lo + (hi - lo) * (cum / total);
  }
  b[weights.size()] = hi;
  return b;
}

bool structurally_equal(const ProcNode& a, const ProcNode& b, double tol) {
  if (a.category != b.category || a.split != b.split || a.children.size() != b.children.size())
    return false;
  std::vector<double> wa, wb;
  for (const auto& c : a.children) wa.push_back(c.weight);
  for (const auto& c : b.children) wb.push_back(c.weight);
  const auto ba = split_boundaries(wa, 0.0, 1.0);
  const auto bb = split_boundaries(wb, 0.0, 1.0);
  for (std::size_t i = 0; i < ba.size(); ++i)
    if (std::abs(ba[i] - bb[i]) > tol) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i].node, b.children[i].node, tol)) return false;
  return true;
}

// ---------------------------------------------------------------- symbol trees

SymbolTree::SymbolTree(std::vector<Symbol> symbols, Size image_size,
                       std::shared_ptr<const CategoryTable> categories)
    : symbols_(std::move(symbols)), image_size_(image_size), categories_(std::move(categories)) {
  if (symbols_.empty()) throw SchemaError("symbol tree is empty");
  if (!categories_) throw SchemaError("symbol tree has no category table");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const Symbol& s = symbols_[i];
    if (s.id != static_cast<SymbolId>(i)) throw SchemaError("symbol ids must equal their index");
    if (!(s.region.x0 < s.region.x1 && s.region.y0 < s.region.y1))
      throw SchemaError("symbol " + std::to_string(i) + " has an empty region");
    if ((i == 0) == s.parent.has_value())
      throw SchemaError("exactly the first symbol must be the root");
    if (s.parent) {
      if (*s.parent < 0 || *s.parent >= static_cast<SymbolId>(i))
        throw SchemaError("symbol " + std::to_string(i) + " has an invalid parent");
      const auto& siblings = symbols_[*s.parent].children;
      if (std::find(siblings.begin(), siblings.end(), s.id) == siblings.end())
        throw SchemaError("parent of symbol " + std::to_string(i) + " does not list it");
      if (s.depth != symbols_[*s.parent].depth + 1)
        throw SchemaError("inconsistent depth at symbol " + std::to_string(i));
    } else if (s.depth != 0) {
      throw SchemaError("root depth must be 0");
    }
    for (SymbolId c : s.children)
      if (c <= s.id || c >= static_cast<SymbolId>(symbols_.size()) || symbols_[c].parent != s.id)
        throw SchemaError("symbol " + std::to_string(i) + " lists an invalid child");
    categories_->at(s.category);
  }
}

const Symbol& SymbolTree::at(SymbolId id) const {
  if (id < 0 || id >= static_cast<SymbolId>(symbols_.size()))
    throw Error("unknown symbol id " + std::to_string(id));
  return symbols_[id];
}

std::vector<SymbolId> SymbolTree::terminals() const {
  std::vector<SymbolId> out;
  for (const auto& s : symbols_)
    if (s.children.empty()) out.push_back(s.id);
  return out;
}

std::vector<SymbolId> SymbolTree::descendants(SymbolId id) const {
  std::vector<SymbolId> out;
  std::vector<SymbolId> stack(at(id).children.rbegin(), at(id).children.rend());
  while (!stack.empty()) {
    SymbolId s = stack.back();
    stack.pop_back();
    out.push_back(s);
    const auto& ch = symbols_[s].children;
    stack.insert(stack.end(), ch.rbegin(), ch.rend());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int SymbolTree::gray_level(SymbolId id) const {
  return categories_->at(at(id).category).gray_level;
}

json SymbolTree::to_json() const {
  json syms = json::array();
  for (const auto& s : symbols_) {
    syms.push_back({{"id", s.id},
                    {"category", s.category},
                    {"region", {s.region.x0, s.region.y0, s.region.x1, s.region.y1}},
                    {"depth", s.depth},
                    {"parent", s.parent ? json(*s.parent) : json(nullptr)},
                    {"children", s.children},
                    {"split", s.split == Split::none ? json(nullptr) : json(to_string(s.split))}});
  }
  return {{"image_size", {image_size_.width, image_size_.height}},
          {"categories", categories_->to_json()},
          {"root", 0},
          {"symbols", std::move(syms)}};
}

SymbolTree SymbolTree::from_json(const json& j, const CategoryRegistry& registry) {
  try {
    std::string name;
    auto table = resolve_table(j.value("categories", json()), registry, name);
    const json& size = j.at("image_size");
    std::vector<Symbol> symbols;
    for (const auto& sj : j.at("symbols")) {
      Symbol s;
      s.id = sj.at("id").get<int>();
      s.category = sj.at("category").get<std::string>();
      const auto& r = sj.at("region");
      s.region = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                  r.at(3).get<double>()};
      s.depth = sj.at("depth").get<int>();
      if (!sj.at("parent").is_null()) s.parent = sj.at("parent").get<int>();
      s.children = sj.at("children").get<std::vector<SymbolId>>();
      const json& split = sj.value("split", json());
      s.split = split.is_null() ? Split::none : split_from_string(split.get<std::string>());
      s.terminal = table->at(s.category).terminal();
      symbols.push_back(std::move(s));
    }
    return SymbolTree(std::move(symbols), {size.at(0).get<int>(), size.at(1).get<int>()},
                      std::move(table));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed symbol tree: ") + e.what());
  }
}

SymbolTree expand(const Procedure& proc) {
  validate(proc);

  struct Pending {
    const ProcNode* node;
    Rect region;
    int depth;
    int parent;  // preorder index
  };
  std::vector<Symbol> pre;
  std::vector<Pending> stack{{&proc.root, kUnitSquare, 0, -1}};
  while (!stack.empty()) {
    Pending p = stack.back();
    stack.pop_back();
    const int index = static_cast<int>(pre.size());
    Symbol s;
    s.id = index;
    s.category = p.node->category;
    s.region = p.region;
    s.depth = p.depth;
    if (p.parent >= 0) {
      s.parent = p.parent;
      pre[p.parent].children.push_back(index);
    }
    s.split = p.node->split;
    s.terminal = proc.categories->at(s.category).terminal();
    pre.push_back(std::move(s));

    const auto& ch = p.node->children;
    if (ch.empty()) continue;
    std::vector<double> weights;
    for (const auto& c : ch) weights.push_back(c.weight);
    const bool vertical = p.node->split == Split::vertical;
    const auto b = vertical ? split_boundaries(weights, p.region.y0, p.region.y1)
                            : split_boundaries(weights, p.region.x0, p.region.x1);
    for (std::size_t i = ch.size(); i-- > 0;) {
      Rect r = p.region;
      if (vertical) {
        r.y0 = b[i];
        r.y1 = b[i + 1];
      } else {
        r.x0 = b[i];
        r.x1 = b[i + 1];
      }
      stack.push_back({&ch[i].node, r, p.depth + 1, index});
    }
  }

  // relabel into processing order
  std::vector<int> order(pre.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const Symbol& sa = pre[a];
    const Symbol& sb = pre[b];
    if (sa.depth != sb.depth) return sa.depth < sb.depth;
    if (sa.region.y0 != sb.region.y0) return sa.region.y0 < sb.region.y0;
    return sa.region.x0 < sb.region.x0;
  });
  std::vector<int> new_id(pre.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<int>(i);

  std::vector<Symbol> symbols;
  symbols.reserve(pre.size());
  for (int old : order) {
    Symbol s = pre[old];
    s.id = new_id[old];
    if (s.parent) s.parent = new_id[*s.parent];
    for (auto& c : s.children) c = new_id[c];
    symbols.push_back(std::move(s));
  }
  return SymbolTree(std::move(symbols), proc.image_size, proc.categories);
}

}  // namespace prodg
