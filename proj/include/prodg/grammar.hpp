#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prodg/geometry.hpp"

namespace prodg {

using json = nlohmann::json;

enum class CategoryKind { terminal, nonterminal };

struct Category {
  std::string name;
  CategoryKind kind = CategoryKind::terminal;
  int gray_level = 0;

  bool terminal() const { return kind == CategoryKind::terminal; }
  friend bool operator==(const Category&, const Category&) = default;
};

/// Set of categories with unique names and unique gray levels.
class CategoryTable {
 public:
  explicit CategoryTable(std::vector<Category> categories);

  /// wall, window, door, balcony, roof, shop, sky, facade, floor, column with gray
  /// levels evenly spaced over 0..255 in that order. facade and floor are nonterminal.
  static CategoryTable default_table();
  static CategoryTable from_json(const json& j);

  const Category* find(std::string_view name) const;
  const Category& at(std::string_view name) const;
  const Category* find_by_gray(int gray_level) const;
  std::span<const Category> categories() const { return categories_; }
  json to_json() const;

  friend bool operator==(const CategoryTable& a, const CategoryTable& b) {
    return a.categories_ == b.categories_;
  }

 private:
  std::vector<Category> categories_;
};

/// Named category tables a procedure document may refer to by string.
class CategoryRegistry {
 public:
  CategoryRegistry();  // holds "default"
  static const CategoryRegistry& builtin();

  void add(std::string name, CategoryTable table);
  std::shared_ptr<const CategoryTable> find(std::string_view name) const;

 private:
  std::map<std::string, std::shared_ptr<const CategoryTable>, std::less<>> tables_;
};

/// `vertical` stacks children top to bottom (splits the y extent); `horizontal`
/// places them left to right (splits the x extent).
enum class Split { none, horizontal, vertical };

struct ProcChild;

struct ProcNode {
  std::string category;
  Split split = Split::none;
  std::vector<ProcChild> children;
};

struct ProcChild {
  double weight = 1.0;
  ProcNode node;
};

struct Procedure {
  Size image_size{512, 512};
  /// Registry name of the category table; empty when the table is inline.
  std::string table_name = "default";
  std::shared_ptr<const CategoryTable> categories;
  ProcNode root;
};

/// Throws SchemaError on the first constraint violation found.
void validate(const Procedure& proc);

Procedure parse_procedure(std::string_view text,
                          const CategoryRegistry& registry = CategoryRegistry::builtin());
Procedure procedure_from_json(const json& doc,
                              const CategoryRegistry& registry = CategoryRegistry::builtin());
json procedure_to_json(const Procedure& proc);
/// Canonical form: sorted keys, 2-space indent, shortest round-trip decimals, trailing newline.
std::string serialize_procedure(const Procedure& proc);

json proc_node_to_json(const ProcNode& node);
/// Structural decoding only; category constraints are checked by validate().
ProcNode proc_node_from_json(const json& j);

/// Same categories, split axes and normalized child extents (within `tol`).
bool structurally_equal(const ProcNode& a, const ProcNode& b, double tol = 1e-12);

/// Boundaries lo = b_0 < b_1 < ... < b_k = hi for children with the given
/// weights. The last boundary is exactly `hi`.
std::vector<double> split_boundaries(std::span<const double> weights, double lo, double hi);

Split split_from_string(std::string_view s);
const char* to_string(Split s);

using SymbolId = int;

struct Symbol {
  SymbolId id = 0;
  std::string category;
  Rect region;
  int depth = 0;
  std::optional<SymbolId> parent;
  std::vector<SymbolId> children;
  Split split = Split::none;
  bool terminal = true;
};

/// Expanded derivation tree. Symbol ids equal their index and follow the
/// processing order: increasing depth, then top-to-bottom, then left-to-right.
class SymbolTree {
 public:
  SymbolTree() = default;
  SymbolTree(std::vector<Symbol> symbols, Size image_size,
             std::shared_ptr<const CategoryTable> categories);

  std::span<const Symbol> symbols() const { return symbols_; }
  const Symbol& at(SymbolId id) const;
  const Symbol& root() const { return symbols_.front(); }
  std::size_t size() const { return symbols_.size(); }
  Size image_size() const { return image_size_; }
  const CategoryTable& categories() const { return *categories_; }
  std::shared_ptr<const CategoryTable> categories_ptr() const { return categories_; }

  std::vector<SymbolId> terminals() const;
  /// Strict descendants of `id` in processing order.
  std::vector<SymbolId> descendants(SymbolId id) const;
  int gray_level(SymbolId id) const;

  json to_json() const;
  static SymbolTree from_json(const json& j,
                              const CategoryRegistry& registry = CategoryRegistry::builtin());

 private:
  std::vector<Symbol> symbols_;
  Size image_size_;
  std::shared_ptr<const CategoryTable> categories_;
};

SymbolTree expand(const Procedure& proc);

}  // namespace prodg
