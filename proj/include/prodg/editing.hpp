#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prodg/grammar.hpp"

namespace prodg {

/// Child-index path from the root; empty addresses the root itself.
using NodePath = std::vector<std::size_t>;

/// Selects children of the addressed parent. Explicit indices win; otherwise
/// children whose category matches are counted 1, 2, 3, ... and every
/// `every`-th one starting at `first` is selected.
struct ChildSelector {
  std::vector<std::size_t> indices;
  std::string category;
  std::size_t every = 1;
  std::size_t first = 1;
};

struct SetWeight {
  double weight = 1.0;
};
/// Replaces every child of `category` under the addressed parent by `count`
/// deep copies of the template child (the first matching one unless given).
struct SetRepeatCount {
  std::string category;
  std::size_t count = 1;
  std::optional<std::size_t> template_index;
};
struct DeleteChildren {
  ChildSelector selector;
};
struct InsertSubtree {
  std::size_t index = 0;
  double weight = 1.0;
  ProcNode node;
};
struct ReplaceSubtree {
  ProcNode node;
  std::optional<double> weight;
};

using EditPayload =
    std::variant<SetWeight, SetRepeatCount, DeleteChildren, InsertSubtree, ReplaceSubtree>;

struct EditOp {
  NodePath path;
  EditPayload payload;
};

struct EditOptions {
  /// Root-level count changes grow or shrink the canvas so that existing
  /// children keep their pixel size, instead of renormalizing the weights.
  bool preserve_extent = false;
};

struct Edit {
  Procedure input;
  Procedure output;
};

/// Sequential application; the input is never modified. Throws EditError
/// carrying the index of the failing op.
Procedure apply_edits(const Procedure& proc, const std::vector<EditOp>& ops,
                      const EditOptions& options = {});

std::vector<EditOp> parse_edit_script(std::string_view text);
std::vector<EditOp> edit_script_from_json(const json& j);
json edit_script_to_json(const std::vector<EditOp>& ops);

/// Resolves a selector to explicit, sorted child indices of `parent`.
std::vector<std::size_t> resolve_selector(const ProcNode& parent, const ChildSelector& sel);

enum class DiffKind { added, removed, reweighted };

struct DiffEntry {
  DiffKind kind;
  NodePath path;
  std::string category;
  double old_fraction = 0.0;
  double new_fraction = 0.0;
};

struct DiffReport {
  std::vector<DiffEntry> entries;
  bool empty() const { return entries.empty(); }
  std::string to_text() const;
  json to_json() const;
};

/// Index-aligned comparison. A category or split-axis change is a removal plus
/// an addition.
/// Weights are compared as fractions of the siblings both trees share, so
/// appending a sibling does not re-weight the others.
DiffReport diff_procedures(const Procedure& a, const Procedure& b);

const char* to_string(DiffKind k);
std::string path_to_string(const NodePath& path);

}  // namespace prodg
