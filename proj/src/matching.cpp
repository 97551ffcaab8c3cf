#include "prodg/matching.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "prodg/digest.hpp"
#include "prodg/error.hpp"

namespace prodg {

namespace {

double position_distance(const Rect& a, const Rect& b) {
  return std::abs(a.x0 - b.x0) + std::abs(a.y0 - b.y0) + std::abs(a.x1 - b.x1) +
         std::abs(a.y1 - b.y1);
}

std::vector<RegionSignature> signatures(const SymbolTree& tree, const Raster& seg,
                                        const MetricConfig& cfg) {
  const auto syms = tree.symbols();
  std::vector<RegionSignature> out(syms.size());
  const Raster gray = to_luma(seg);
  std::exception_ptr failure;
  const long long n = static_cast<long long>(syms.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      out[i] = region_signature(extract_pixels(gray, metric_pixels(syms[i].region, gray.size())),
                                cfg);
    } catch (...) {
#pragma omp critical(prodg_matching_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

json rect_json(const Rect& r) { return {r.x0, r.y0, r.x1, r.y1}; }

Rect rect_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
          j.at(3).get<double>()};
}

json candidate_json(const Candidate& c) {
  return {{"in_id", c.in_symbol},
          {"svd", c.distance.svd},
          {"hellinger", c.distance.hellinger},
          {"combined", c.distance.combined}};
}

}  // namespace

const char* to_string(FallbackLevel level) {
  switch (level) {
    case FallbackLevel::matched_as_child: return "matched-as-child";
    case FallbackLevel::matched_in_subtree: return "matched-in-subtree";
    case FallbackLevel::matched_globally: return "matched-globally";
    case FallbackLevel::unmatched: return "unmatched";
  }
  return "?";
}

FallbackLevel fallback_level_from_string(std::string_view s) {
  for (auto l : {FallbackLevel::matched_as_child, FallbackLevel::matched_in_subtree,
                 FallbackLevel::matched_globally, FallbackLevel::unmatched})
    if (s == to_string(l)) return l;
  throw SchemaError("unknown fallback level \"" + std::string(s) + "\"");
}

PixelRect metric_pixels(const Rect& region, Size raster_size) {
  return to_pixels_collapsed(region, raster_size);
}

std::string tree_hash(const SymbolTree& tree) { return sha256_hex(tree.to_json().dump()); }

PairingList match_trees(const SymbolTree& t_in, const SymbolTree& t_out, const Raster& seg_in,
                        const Raster& seg_out, const MetricConfig& cfg) {
  cfg.validate();
  if (seg_in.size() != seg_out.size())
    throw Error("resolution mismatch: input raster " + std::to_string(seg_in.width) + "x" +
                std::to_string(seg_in.height) + ", output raster " +
                std::to_string(seg_out.width) + "x" + std::to_string(seg_out.height));

  const auto sig_in = signatures(t_in, seg_in, cfg);
  const auto sig_out = signatures(t_out, seg_out, cfg);

  PairingList list;
  list.config = cfg;
  list.resolution = seg_in.size();
  list.in_tree_hash = tree_hash(t_in);
  list.out_tree_hash = tree_hash(t_out);
  list.pairings.resize(t_out.size());

  const auto same_category = [&](const std::string& cat, const std::vector<SymbolId>& ids) {
    std::vector<SymbolId> out;
    for (SymbolId id : ids)
      if (t_in.at(id).category == cat) out.push_back(id);
    return out;
  };
  std::vector<SymbolId> all_in(t_in.size());
  for (std::size_t i = 0; i < all_in.size(); ++i) all_in[i] = static_cast<SymbolId>(i);

  for (const Symbol& s : t_out.symbols()) {
    Pairing& p = list.pairings[s.id];
    p.out_symbol = s.id;
    p.category = s.category;
    p.terminal = s.terminal;
    p.out_region = s.region;

    std::vector<SymbolId> pool;
    FallbackLevel level = FallbackLevel::unmatched;
    const auto attempt = [&](FallbackLevel l, std::vector<SymbolId> ids) {
      if (!pool.empty()) return;
      p.searched.push_back(l);
      pool = same_category(s.category, ids);
      if (!pool.empty()) level = l;
    };

    std::optional<SymbolId> anchor;
    if (!s.parent) {
      attempt(FallbackLevel::matched_as_child, {t_in.root().id});
    } else {
      anchor = list.pairings[*s.parent].in_symbol;
      if (anchor) {
        attempt(FallbackLevel::matched_as_child, t_in.at(*anchor).children);
        attempt(FallbackLevel::matched_in_subtree, t_in.descendants(*anchor));
      }
    }
    attempt(FallbackLevel::matched_globally, all_in);
    p.fallback_level = level;
    if (pool.empty()) continue;

    std::size_t best = 0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const SymbolId in = pool[k];
      p.candidates.push_back({in, signature_distance(sig_out[s.id], sig_in[in], cfg)});
      if (k == 0) continue;
      const double sc = p.candidates[k].distance.combined;
      const double sb = p.candidates[best].distance.combined;
      if (sc < sb ||
          (sc == sb && position_distance(t_in.at(in).region, s.region) <
                           position_distance(t_in.at(pool[best]).region, s.region)))
        best = k;
    }
    p.in_symbol = pool[best];
    p.score = p.candidates[best].distance.combined;
    p.in_region = t_in.at(pool[best]).region;
  }
  return list;
}

const Pairing& PairingList::for_symbol(SymbolId out_id) const {
  if (out_id < 0 || out_id >= static_cast<SymbolId>(pairings.size()))
    throw Error("unknown output symbol id " + std::to_string(out_id));
  return pairings[out_id];
}

double PairingList::total_score() const {
  double total = 0.0;
  for (const auto& p : pairings)
    if (p.score) total += *p.score;
  return total;
}

std::size_t PairingList::unmatched_count() const {
  std::size_t n = 0;
  for (const auto& p : pairings)
    if (!p.in_symbol) ++n;
  return n;
}

json PairingList::to_json() const {
  json arr = json::array();
  for (const auto& p : pairings) {
    json cands = json::array();
    for (const auto& c : p.candidates) cands.push_back(candidate_json(c));
    json searched = json::array();
    for (auto l : p.searched) searched.push_back(to_string(l));
    arr.push_back({{"out_id", p.out_symbol},
                   {"in_id", p.in_symbol ? json(*p.in_symbol) : json(nullptr)},
                   {"score", p.score ? json(*p.score) : json(nullptr)},
                   {"fallback_level", to_string(p.fallback_level)},
                   {"category", p.category},
                   {"terminal", p.terminal},
                   {"out_region", rect_json(p.out_region)},
                   {"in_region", p.in_region ? rect_json(*p.in_region) : json(nullptr)},
                   {"candidates", std::move(cands)},
                   {"searched", std::move(searched)}});
  }
  return {{"config", config.to_json()},
          {"resolution", {resolution.width, resolution.height}},
          {"in_tree_hash", in_tree_hash},
          {"out_tree_hash", out_tree_hash},
          {"pairings", std::move(arr)}};
}

PairingList PairingList::from_json(const json& j) {
  PairingList list;
  try {
    list.config = MetricConfig::from_json(j.at("config"));
    list.resolution = {j.at("resolution").at(0).get<int>(), j.at("resolution").at(1).get<int>()};
    list.in_tree_hash = j.at("in_tree_hash").get<std::string>();
    list.out_tree_hash = j.at("out_tree_hash").get<std::string>();
    for (const auto& pj : j.at("pairings")) {
      Pairing p;
      p.out_symbol = pj.at("out_id").get<int>();
      if (!pj.at("in_id").is_null()) p.in_symbol = pj["in_id"].get<int>();
      if (!pj.at("score").is_null()) p.score = pj["score"].get<double>();
      p.fallback_level = fallback_level_from_string(pj.at("fallback_level").get<std::string>());
      p.category = pj.at("category").get<std::string>();
      p.terminal = pj.at("terminal").get<bool>();
      p.out_region = rect_from_json(pj.at("out_region"));
      if (!pj.at("in_region").is_null()) p.in_region = rect_from_json(pj["in_region"]);
      for (const auto& cj : pj.value("candidates", json::array()))
        p.candidates.push_back({cj.at("in_id").get<int>(),
                                {cj.at("svd").get<double>(), cj.at("hellinger").get<double>(),
                                 cj.at("combined").get<double>()}});
      for (const auto& lj : pj.value("searched", json::array()))
        p.searched.push_back(fallback_level_from_string(lj.get<std::string>()));
      if (p.in_symbol.has_value() != p.score.has_value() ||
          p.in_symbol.has_value() != p.in_region.has_value())
        throw SchemaError("pairing " + std::to_string(p.out_symbol) +
                          ": in_id, score and in_region must be all present or all null");
      if (p.out_symbol != static_cast<SymbolId>(list.pairings.size()))
        throw SchemaError("pairings must be listed in output-id order");
      list.pairings.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed pairing list: ") + e.what());
  }
  return list;
}

PairingExplanation explain_pairing(const PairingList& list, SymbolId out_id) {
  const Pairing& p = list.for_symbol(out_id);
  return {p.out_symbol, p.category, p.fallback_level, p.searched, p.candidates, p.in_symbol};
}

std::string PairingExplanation::to_text() const {
  std::ostringstream os;
  os << "symbol " << out_symbol << " (" << category << "): " << to_string(fallback_level) << '\n';
  os << "  searched:";
  for (auto l : searched) os << ' ' << to_string(l);
  os << '\n';
  for (const auto& c : candidates) {
    os << "  " << (chosen && *chosen == c.in_symbol ? '*' : ' ') << " in " << c.in_symbol
       << "  svd " << c.distance.svd << "  hellinger " << c.distance.hellinger << "  combined "
       << c.distance.combined << '\n';
  }
  if (candidates.empty()) os << "  no candidates\n";
  return os.str();
}

json PairingExplanation::to_json() const {
  json cands = json::array();
  for (const auto& c : candidates) cands.push_back(candidate_json(c));
  json s = json::array();
  for (auto l : searched) s.push_back(to_string(l));
  return {{"out_id", out_symbol},
          {"category", category},
          {"fallback_level", to_string(fallback_level)},
          {"searched", std::move(s)},
          {"candidates", std::move(cands)},
          {"chosen", chosen ? json(*chosen) : json(nullptr)}};
}

}  // namespace prodg
