#include "prodg/editing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "prodg/error.hpp"

namespace prodg {

namespace {

ProcNode* resolve(ProcNode& root, const NodePath& path, std::size_t op_index) {
  ProcNode* node = &root;
  for (std::size_t depth = 0; depth < path.size(); ++depth) {
    if (path[depth] >= node->children.size())
      throw EditError("path " + path_to_string(path) + " not found (no child " +
                          std::to_string(path[depth]) + " at depth " + std::to_string(depth) + ")",
                      op_index);
    node = &node->children[path[depth]].node;
  }
  return node;
}

double weight_sum(const ProcNode& n) {
  double s = 0.0;
  for (const auto& c : n.children) s += c.weight;
  return s;
}

/// Canvas growth for count-changing edits on the root under preserve_extent.
void grow_canvas(Procedure& proc, double old_sum, double new_sum) {
  if (proc.root.split == Split::none || old_sum <= 0.0) return;
  int& extent =
      proc.root.split == Split::vertical ? proc.image_size.height : proc.image_size.width;
  extent = std::max(1, static_cast<int>(std::lround(extent * (new_sum / old_sum))));
}

void apply_one(Procedure& proc, const EditOp& op, std::size_t op_index,
               const EditOptions& options) {
  const bool count_changing = std::holds_alternative<SetRepeatCount>(op.payload) ||
                              std::holds_alternative<DeleteChildren>(op.payload) ||
                              std::holds_alternative<InsertSubtree>(op.payload);
  if (options.preserve_extent && count_changing && !op.path.empty())
    throw EditError("preserve-extent supports count changes on the root only", op_index);

  ProcNode& root = proc.root;
  const double old_root_sum = weight_sum(root);

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SetWeight>) {
          if (op.path.empty()) throw EditError("the root has no weight", op_index);
          if (!std::isfinite(p.weight) || p.weight <= 0.0)
            throw EditError("weight must be positive", op_index);
          NodePath parent_path(op.path.begin(), op.path.end() - 1);
          ProcNode* parent = resolve(root, parent_path, op_index);
          resolve(root, op.path, op_index);
          parent->children[op.path.back()].weight = p.weight;
        } else if constexpr (std::is_same_v<T, SetRepeatCount>) {
          ProcNode* parent = resolve(root, op.path, op_index);
          std::vector<std::size_t> family;
          for (std::size_t i = 0; i < parent->children.size(); ++i)
            if (parent->children[i].node.category == p.category) family.push_back(i);
          if (family.empty())
            throw EditError("no children of category \"" + p.category + "\" at " +
                                path_to_string(op.path),
                            op_index);
          std::size_t tmpl = family.front();
          if (p.template_index) {
            tmpl = *p.template_index;
            if (std::find(family.begin(), family.end(), tmpl) == family.end())
              throw EditError("template index is not a \"" + p.category + "\" child", op_index);
          }
          const ProcChild templ = parent->children[tmpl];
          std::vector<ProcChild> next;
          for (std::size_t i = 0; i < parent->children.size(); ++i) {
            if (i == family.front()) next.insert(next.end(), p.count, templ);
            if (parent->children[i].node.category != p.category)
              next.push_back(std::move(parent->children[i]));
          }
          parent->children = std::move(next);
        } else if constexpr (std::is_same_v<T, DeleteChildren>) {
          ProcNode* parent = resolve(root, op.path, op_index);
          const auto doomed = resolve_selector(*parent, p.selector);
          for (std::size_t i : doomed)
            if (i >= parent->children.size())
              throw EditError("child index " + std::to_string(i) + " out of range", op_index);
          for (auto it = doomed.rbegin(); it != doomed.rend(); ++it)
            parent->children.erase(parent->children.begin() + static_cast<std::ptrdiff_t>(*it));
        } else if constexpr (std::is_same_v<T, InsertSubtree>) {
          ProcNode* parent = resolve(root, op.path, op_index);
          if (p.index > parent->children.size())
            throw EditError("insert index out of range", op_index);
          parent->children.insert(parent->children.begin() + static_cast<std::ptrdiff_t>(p.index),
                                  ProcChild{p.weight, p.node});
        } else if constexpr (std::is_same_v<T, ReplaceSubtree>) {
          ProcNode* node = resolve(root, op.path, op_index);
          *node = p.node;
          if (p.weight) {
            if (op.path.empty()) throw EditError("the root has no weight", op_index);
            NodePath parent_path(op.path.begin(), op.path.end() - 1);
            resolve(root, parent_path, op_index)->children[op.path.back()].weight = *p.weight;
          }
        }
      },
      op.payload);

  if (options.preserve_extent && count_changing) grow_canvas(proc, old_root_sum, weight_sum(root));

  try {
    validate(proc);
  } catch (const SchemaError& e) {
    throw EditError(std::string("edit produces an invalid procedure: ") + e.what(), op_index);
  }
}

NodePath path_from_json(const json& j) {
  if (j.is_null()) return {};
  if (!j.is_array()) throw SchemaError("path must be an array of child indices");
  NodePath p;
  for (const auto& e : j) {
    if (!e.is_number_unsigned()) throw SchemaError("path entries must be non-negative integers");
    p.push_back(e.get<std::size_t>());
  }
  return p;
}

ChildSelector selector_from_json(const json& j) {
  ChildSelector sel;
  if (j.contains("indices")) sel.indices = j["indices"].get<std::vector<std::size_t>>();
  sel.category = j.value("category", std::string());
  sel.every = j.value("every", std::size_t{1});
  sel.first = j.value("first", sel.every);
  if (sel.indices.empty() && sel.category.empty())
    throw SchemaError("delete_children needs indices or a category selector");
  if (sel.every == 0 || sel.first == 0) throw SchemaError("every/first must be >= 1");
  return sel;
}

EditOp op_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("edit op must be an object with a \"kind\" string");
  const std::string kind = j["kind"].get<std::string>();
  EditOp op;
  op.path = path_from_json(j.value("path", json()));
  if (kind == "set_weight") {
    op.payload = SetWeight{j.at("weight").get<double>()};
  } else if (kind == "set_repeat_count") {
    SetRepeatCount p;
    p.category = j.at("category").get<std::string>();
    p.count = j.at("count").get<std::size_t>();
    if (j.contains("template")) p.template_index = j["template"].get<std::size_t>();
    op.payload = p;
  } else if (kind == "delete_children") {
    op.payload = DeleteChildren{selector_from_json(j)};
  } else if (kind == "insert_subtree") {
    op.payload = InsertSubtree{j.at("index").get<std::size_t>(), j.value("weight", 1.0),
                               proc_node_from_json(j.at("node"))};
  } else if (kind == "replace_subtree") {
    ReplaceSubtree p{proc_node_from_json(j.at("node")), std::nullopt};
    if (j.contains("weight")) p.weight = j["weight"].get<double>();
    op.payload = p;
  } else {
    throw SchemaError("unknown edit op \"" + kind + "\"");
  }
  return op;
}

json op_to_json(const EditOp& op) {
  json j;
  j["path"] = op.path;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SetWeight>) {
          j["kind"] = "set_weight";
          j["weight"] = p.weight;
        } else if constexpr (std::is_same_v<T, SetRepeatCount>) {
          j["kind"] = "set_repeat_count";
          j["category"] = p.category;
          j["count"] = p.count;
          if (p.template_index) j["template"] = *p.template_index;
        } else if constexpr (std::is_same_v<T, DeleteChildren>) {
          j["kind"] = "delete_children";
          if (!p.selector.indices.empty()) j["indices"] = p.selector.indices;
          if (!p.selector.category.empty()) {
            j["category"] = p.selector.category;
            j["every"] = p.selector.every;
            j["first"] = p.selector.first;
          }
        } else if constexpr (std::is_same_v<T, InsertSubtree>) {
          j["kind"] = "insert_subtree";
          j["index"] = p.index;
          j["weight"] = p.weight;
          j["node"] = proc_node_to_json(p.node);
        } else if constexpr (std::is_same_v<T, ReplaceSubtree>) {
          j["kind"] = "replace_subtree";
          j["node"] = proc_node_to_json(p.node);
          if (p.weight) j["weight"] = *p.weight;
        }
      },
      op.payload);
  return j;
}

void diff_nodes(const ProcNode& a, const ProcNode& b, NodePath& path, DiffReport& out) {
  const std::size_t shared = std::min(a.children.size(), b.children.size());
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t i = 0; i < shared; ++i) {
    sum_a += a.children[i].weight;
    sum_b += b.children[i].weight;
  }
  for (std::size_t i = 0; i < shared; ++i) {
    const ProcNode& ca = a.children[i].node;
    const ProcNode& cb = b.children[i].node;
    path.push_back(i);
    if (ca.category != cb.category || ca.split != cb.split) {
      out.entries.push_back({DiffKind::removed, path, ca.category});
      out.entries.push_back({DiffKind::added, path, cb.category});
    } else {
      const double fa = a.children[i].weight / sum_a;
      const double fb = b.children[i].weight / sum_b;
      if (std::abs(fa - fb) > 1e-12)
        out.entries.push_back({DiffKind::reweighted, path, ca.category, fa, fb});
      diff_nodes(ca, cb, path, out);
    }
    path.pop_back();
  }
  for (std::size_t i = shared; i < a.children.size(); ++i) {
    path.push_back(i);
    out.entries.push_back({DiffKind::removed, path, a.children[i].node.category});
    path.pop_back();
  }
  for (std::size_t i = shared; i < b.children.size(); ++i) {
    path.push_back(i);
    out.entries.push_back({DiffKind::added, path, b.children[i].node.category});
    path.pop_back();
  }
}

}  // namespace

std::vector<std::size_t> resolve_selector(const ProcNode& parent, const ChildSelector& sel) {
  std::vector<std::size_t> out;
  if (!sel.indices.empty()) {
    out = sel.indices;
  } else {
    std::size_t k = 0;
    for (std::size_t i = 0; i < parent.children.size(); ++i) {
      if (parent.children[i].node.category != sel.category) continue;
      ++k;
      if (k >= sel.first && (k - sel.first) % sel.every == 0) out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Procedure apply_edits(const Procedure& proc, const std::vector<EditOp>& ops,
                      const EditOptions& options) {
  Procedure out = proc;
  for (std::size_t i = 0; i < ops.size(); ++i) apply_one(out, ops[i], i, options);
  return out;
}

std::vector<EditOp> edit_script_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("edit script must be a JSON array");
  std::vector<EditOp> ops;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      ops.push_back(op_from_json(j[i]));
    } catch (const json::exception& e) {
      throw SchemaError("edit op " + std::to_string(i) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError("edit op " + std::to_string(i) + ": " + e.what());
    }
  }
  return ops;
}

std::vector<EditOp> parse_edit_script(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("syntax error: ") + e.what(), e.byte);
  }
  return edit_script_from_json(j);
}

json edit_script_to_json(const std::vector<EditOp>& ops) {
  json arr = json::array();
  for (const auto& op : ops) arr.push_back(op_to_json(op));
  return arr;
}

const char* to_string(DiffKind k) {
  switch (k) {
    case DiffKind::added: return "added";
    case DiffKind::removed: return "removed";
    case DiffKind::reweighted: return "reweighted";
  }
  return "?";
}

std::string path_to_string(const NodePath& path) {
  std::string s = "/";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += "/";
    s += std::to_string(path[i]);
  }
  return s;
}

DiffReport diff_procedures(const Procedure& a, const Procedure& b) {
  DiffReport report;
  NodePath path;
  if (a.root.category != b.root.category || a.root.split != b.root.split) {
    report.entries.push_back({DiffKind::removed, path, a.root.category});
    report.entries.push_back({DiffKind::added, path, b.root.category});
    return report;
  }
  diff_nodes(a.root, b.root, path, report);
  return report;
}

std::string DiffReport::to_text() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << to_string(e.kind) << ' ' << path_to_string(e.path) << ' ' << e.category;
    if (e.kind == DiffKind::reweighted) os << ' ' << e.old_fraction << " -> " << e.new_fraction;
    os << '\n';
  }
  return os.str();
}

json DiffReport::to_json() const {
  json arr = json::array();
  for (const auto& e : entries) {
    json j{{"kind", to_string(e.kind)}, {"path", e.path}, {"category", e.category}};
    if (e.kind == DiffKind::reweighted) {
      j["old_fraction"] = e.old_fraction;
      j["new_fraction"] = e.new_fraction;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace prodg
