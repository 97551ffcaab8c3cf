#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prodg/grammar.hpp"
#include "prodg/metrics.hpp"
#include "prodg/raster.hpp"

namespace prodg {

/// How far the candidate search had to widen. Candidates are always restricted
/// to the out-symbol's category.
enum class FallbackLevel {
  matched_as_child,    // children of the parent's match (the root matches the root)
  matched_in_subtree,  // deeper descendants of the parent's match
  matched_globally,    // anywhere in the input tree
  unmatched,
};

const char* to_string(FallbackLevel level);
FallbackLevel fallback_level_from_string(std::string_view s);

struct Candidate {
  SymbolId in_symbol = 0;
  DistanceBreakdown distance;
};

struct Pairing {
  SymbolId out_symbol = 0;
  std::optional<SymbolId> in_symbol;
  std::optional<double> score;
  FallbackLevel fallback_level = FallbackLevel::unmatched;
  std::string category;
  bool terminal = false;
  Rect out_region;
  std::optional<Rect> in_region;
  /// The candidate set the choice was made from, in input processing order.
  std::vector<Candidate> candidates;
  /// Every search level that was tried, in order.
  std::vector<FallbackLevel> searched;
};

struct PairingList {
  /// One entry per output symbol, in output processing order (entry i is symbol i).
  std::vector<Pairing> pairings;
  MetricConfig config;
  Size resolution;
  std::string in_tree_hash;
  std::string out_tree_hash;

  const Pairing& for_symbol(SymbolId out_id) const;
  double total_score() const;
  std::size_t unmatched_count() const;

  nlohmann::json to_json() const;
  static PairingList from_json(const nlohmann::json& j);
};

/// Greedy hierarchical pairing. Output symbols are visited in processing order;
/// each takes the same-category candidate with the lowest combined distance
/// between the extracted region matrices. Ties go to the candidate whose region
/// is closest in normalized coordinates, then to the lower input id. Input
/// symbols may be chosen any number of times.
PairingList match_trees(const SymbolTree& t_in, const SymbolTree& t_out, const Raster& seg_in,
                        const Raster& seg_out, const MetricConfig& cfg);

struct PairingExplanation {
  SymbolId out_symbol = 0;
  std::string category;
  FallbackLevel fallback_level = FallbackLevel::unmatched;
  std::vector<FallbackLevel> searched;
  std::vector<Candidate> candidates;
  std::optional<SymbolId> chosen;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

PairingExplanation explain_pairing(const PairingList& list, SymbolId out_id);

/// Half-open pixel rect of a symbol for metric extraction; never empty.
PixelRect metric_pixels(const Rect& region, Size raster_size);

std::string tree_hash(const SymbolTree& tree);

}  // namespace prodg
