#include "prodg/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <map>

#include "prodg/digest.hpp"
#include "prodg/editing.hpp"
#include "prodg/guidance.hpp"
#include "prodg/image_io.hpp"
#include "prodg/matching.hpp"

namespace prodg {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void PipelineConfig::validate() const {
  metric.validate();
  if (resolution < 8) throw Error("resolution must be at least 8");
  if (!(canny.low_threshold < canny.high_threshold))
    throw Error("canny thresholds out of order: low must be below high");
  if (!(canny.sigma > 0.0) || canny.kernel_size < 1 || canny.kernel_size % 2 == 0)
    throw Error("canny sigma must be positive and kernel_size odd");
  if (swd_projections == 0) throw Error("swd_projections must be positive");
  registry();
}

nlohmann::json PipelineConfig::to_json() const {
  return {{"metric", metric.to_json()},
          {"canny",
           {{"sigma", canny.sigma},
            {"kernel_size", canny.kernel_size},
            {"low", canny.low_threshold},
            {"high", canny.high_threshold}}},
          {"resolution", resolution},
          {"seed", seed},
          {"swd_projections", swd_projections},
          {"preserve_extent", preserve_extent},
          {"category_tables", category_tables}};
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  PipelineConfig c;
  try {
    // metric keys may sit under "metric" or at top level
    c.metric = MetricConfig::from_json(j.contains("metric") ? j["metric"] : j);
    if (j.contains("canny")) {
      const auto& cj = j["canny"];
      c.canny.sigma = cj.value("sigma", c.canny.sigma);
      c.canny.kernel_size = cj.value("kernel_size", c.canny.kernel_size);
      c.canny.low_threshold = cj.value("low", c.canny.low_threshold);
      c.canny.high_threshold = cj.value("high", c.canny.high_threshold);
    }
    c.resolution = j.value("resolution", c.resolution);
    c.seed = j.value("seed", c.seed);
    c.swd_projections = j.value("swd_projections", c.swd_projections);
    c.preserve_extent = j.value("preserve_extent", c.preserve_extent);
    c.category_tables = j.value("category_tables", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string("config syntax error: ") + e.what(), e.byte);
  }
}

std::string PipelineConfig::digest() const { return sha256_hex(to_json().dump()); }

CategoryRegistry PipelineConfig::registry() const {
  CategoryRegistry r;
  if (!category_tables.is_object()) throw Error("category_tables must be an object");
  for (const auto& [name, table] : category_tables.items())
    r.add(name, CategoryTable::from_json(table));
  return r;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

/// Target canvas for the output guidance: the input image's pixel size scaled
/// by however much the procedure's canvas changed.
Size output_canvas(Size c_in, const Procedure& p_in, const Procedure& p_out) {
  const auto scale = [](int v, int num, int den) {
    if (num == den) return v;
    return std::max(1, static_cast<int>(std::lround(static_cast<double>(v) * num / den)));
  };
  return {scale(c_in.width, p_out.image_size.width, p_in.image_size.width),
          scale(c_in.height, p_out.image_size.height, p_in.image_size.height)};
}

}  // namespace

PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config,
                            const fs::path& out_dir) {
  stage("config", [&] { config.validate(); });
  const std::string config_digest = config.digest();
  const CategoryRegistry registry = stage("config", [&] { return config.registry(); });

  const Procedure p_in =
      stage("parse", [&] { return parse_procedure(read_text_file(inputs.p_in), registry); });
  const Procedure p_out = stage("parse", [&] {
    if (inputs.p_out) return parse_procedure(read_text_file(*inputs.p_out), registry);
    if (inputs.edit_script) {
      const auto ops = parse_edit_script(read_text_file(*inputs.edit_script));
      return apply_edits(p_in, ops, {config.preserve_extent});
    }
    throw Error("either an output procedure or an edit script is required");
  });
  const std::vector<ActivationGrid> psi_in = stage("parse", [&] {
    return inputs.psi ? read_act(*inputs.psi) : std::vector<ActivationGrid>{};
  });
  const std::optional<Raster> photo = stage("parse", [&] {
    return inputs.image ? std::optional<Raster>(read_image(*inputs.image)) : std::nullopt;
  });

  const SymbolTree t_in = stage("expand", [&] { return expand(p_in); });
  const SymbolTree t_out = stage("expand", [&] { return expand(p_out); });

  const int n = config.resolution;
  const Raster seg_in = stage("rasterize", [&] { return rasterize(t_in, n, n); });
  const Raster seg_out = stage("rasterize", [&] { return rasterize(t_out, n, n); });

  // without a photo the edge map comes from the input segmentation at canvas size
  const Raster c_in = stage("canny", [&] {
    if (photo) return canny(*photo, config.canny);
    return canny(rasterize(t_in, p_in.image_size.width, p_in.image_size.height), config.canny);
  });

  const PairingList pairings =
      stage("match", [&] { return match_trees(t_in, t_out, seg_in, seg_out, config.metric); });

  PipelineResult result;
  result.out_dir = out_dir;
  result.total_score = pairings.total_score();
  result.unmatched = pairings.unmatched_count();

  const Size target = output_canvas(c_in.size(), p_in, p_out);
  const CannyOut c_out = stage("guide", [&] { return build_canny_out(c_in, pairings, target); });
  std::vector<GuidanceWarning> warnings = c_out.warnings;
  const std::vector<ActivationGrid> psi_out = stage("guide", [&] {
    return psi_in.empty() ? std::vector<ActivationGrid>{}
                          : build_activations_out(psi_in, pairings);
  });
  for (const auto& p : pairings.pairings)
    if (!p.terminal && !p.in_symbol)
      warnings.push_back({p.out_symbol, "symbol " + std::to_string(p.out_symbol) + " (" +
                                            p.category + ") is unmatched"});
  for (const auto& w : warnings) result.warnings.push_back(w.message);

  stage("write", [&] {
    fs::create_directories(out_dir);
    const std::map<std::string, std::string> text{{"prodg-config-digest", config_digest}};
    const auto json_file = [&](const char* name, nlohmann::json j) {
      j["config_digest"] = config_digest;
      write_text_file(out_dir / name, j.dump(2) + "\n");
      result.artifacts.push_back(name);
    };
    const auto png_file = [&](const char* name, const Raster& r) {
      write_png(out_dir / name, r, text);
      result.artifacts.push_back(name);
    };

    json_file("tree_in.json", t_in.to_json());
    json_file("tree_out.json", t_out.to_json());
    write_text_file(out_dir / "p_out.json", serialize_procedure(p_out));
    result.artifacts.push_back("p_out.json");
    png_file("seg_in.png", seg_in);
    png_file("seg_out.png", seg_out);
    png_file("canny_in.png", c_in);
    nlohmann::json pj = pairings.to_json();
    pj["pairing_hash"] = pairing_hash(pairings);
    json_file("pairings.json", std::move(pj));
    png_file("canny_out.png", c_out.canny);
    png_file("coverage_mask.png", c_out.coverage);
    if (!psi_in.empty()) {
      write_act(out_dir / "psi_out.act", psi_out);
      result.artifacts.push_back("psi_out.act");
    }

    nlohmann::json digests = nlohmann::json::object();
    for (const auto& a : result.artifacts) digests[a] = sha256_file(out_dir / a);
    nlohmann::json input_digests = {{"p_in", sha256_file(inputs.p_in)}};
    if (inputs.p_out) input_digests["p_out"] = sha256_file(*inputs.p_out);
    if (inputs.edit_script) input_digests["edit_script"] = sha256_file(*inputs.edit_script);
    if (inputs.image) input_digests["image"] = sha256_file(*inputs.image);
    if (inputs.psi) input_digests["psi"] = sha256_file(*inputs.psi);

    const nlohmann::json manifest = {
        {"config", config.to_json()},
        {"config_digest", config_digest},
        {"inputs", input_digests},
        {"artifacts", digests},
        {"pairing_hash", pairing_hash(pairings)},
        {"summary",
         {{"symbols_out", t_out.size()},
          {"terminals_out", t_out.terminals().size()},
          {"unmatched", result.unmatched},
          {"total_score", result.total_score},
          {"zero_score", result.total_score == 0.0},
          {"canvas", {target.width, target.height}}}},
        {"warnings", result.warnings}};
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    result.artifacts.push_back("manifest.json");
  });
  return result;
}

}  // namespace prodg
