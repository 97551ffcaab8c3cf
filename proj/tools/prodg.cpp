#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "prodg/editing.hpp"
#include "prodg/grammar.hpp"
#include "prodg/guidance.hpp"
#include "prodg/image_io.hpp"
#include "prodg/matching.hpp"
#include "prodg/metrics.hpp"
#include "prodg/pipeline.hpp"
#include "prodg/raster.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prodg;

namespace {

constexpr int kExitFailure = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("prodg");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("PRODG_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("ignoring unknown PRODG_LOG level '{}'", env);
  }
}

int fail(const std::string& stage, const std::string& message) {
  std::cerr << json{{"error", {{"stage", stage}, {"message", message}}}}.dump() << '\n';
  return kExitFailure;
}

PipelineConfig load_config(const std::optional<std::string>& path) {
  return path ? PipelineConfig::load(*path) : PipelineConfig{};
}

/// Accepts either a procedure or an expanded symbol tree.
SymbolTree load_tree(const std::string& path, const CategoryRegistry& registry) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SyntaxError(path + ": " + e.what(), e.byte);
  }
  if (j.is_object() && j.contains("symbols")) return SymbolTree::from_json(j, registry);
  return expand(procedure_from_json(j, registry));
}

/// First entry of an .act file as count x D points, count = C*H and D = W.
PointSet load_features(const std::string& path) {
  const auto grids = read_act(path);
  if (grids.empty()) throw FormatError(path + ": no entries");
  const ActivationGrid& g = grids.front();
  PointSet p;
  p.dim = static_cast<std::size_t>(g.width);
  p.data.assign(g.data.begin(), g.data.end());
  return p;
}

void write_raster(const fs::path& path, const Raster& r) {
  if (path.extension() == ".pgm") write_pgm(path, r);
  else write_png(path, r);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Procedural facade editing with hierarchical region matching"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  // parse
  auto* parse = app.add_subcommand("parse", "Validate a procedure and print it canonically");
  std::string parse_in;
  std::optional<std::string> parse_out;
  parse->add_option("--in", parse_in)->required();
  parse->add_option("--out", parse_out);

  // edit
  auto* edit = app.add_subcommand("edit", "Apply an edit script to a procedure");
  std::string edit_in, edit_script, edit_out;
  bool edit_preserve = false;
  edit->add_option("--in", edit_in)->required();
  edit->add_option("--script", edit_script)->required();
  edit->add_option("--out", edit_out)->required();
  edit->add_flag("--preserve-extent", edit_preserve);

  // diff
  auto* diff = app.add_subcommand("diff", "Summarize differences between two procedures");
  std::string diff_a, diff_b;
  bool diff_json = false;
  diff->add_option("--a", diff_a)->required();
  diff->add_option("--b", diff_b)->required();
  diff->add_flag("--json", diff_json);

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "Expand a procedure into a symbol tree");
  std::string expand_in, expand_out;
  expand_cmd->add_option("--in", expand_in)->required();
  expand_cmd->add_option("--out", expand_out)->required();

  // rasterize
  auto* raster = app.add_subcommand("rasterize", "Render the segmentation of a procedure or tree");
  std::string raster_in, raster_out;
  std::optional<int> raster_res;
  raster->add_option("--in", raster_in)->required();
  raster->add_option("--out", raster_out)->required();
  raster->add_option("--resolution", raster_res)->check(CLI::PositiveNumber);

  // canny
  auto* canny_cmd = app.add_subcommand("canny", "Binary edge map of an image");
  std::string canny_image, canny_out;
  std::optional<double> canny_sigma, canny_low, canny_high;
  canny_cmd->add_option("--image", canny_image)->required()->check(CLI::ExistingFile);
  canny_cmd->add_option("--out", canny_out)->required();
  canny_cmd->add_option("--sigma", canny_sigma);
  canny_cmd->add_option("--low", canny_low);
  canny_cmd->add_option("--high", canny_high);

  // match
  auto* match = app.add_subcommand("match", "Pair output symbols with input symbols");
  std::string match_in, match_out, match_emit;
  std::optional<int> match_res;
  match->add_option("--in-tree", match_in)->required();
  match->add_option("--out-tree", match_out)->required();
  match->add_option("--emit", match_emit)->required();
  match->add_option("--resolution", match_res);

  // explain
  auto* explain = app.add_subcommand("explain", "Show the candidates considered for one symbol");
  std::string explain_pairings;
  SymbolId explain_symbol = 0;
  bool explain_json = false;
  explain->add_option("--pairings", explain_pairings)->required();
  explain->add_option("--symbol", explain_symbol)->required();
  explain->add_flag("--json", explain_json);

  // guide
  auto* guide = app.add_subcommand("guide", "Build the output edge map and activations");
  std::string guide_pairings, guide_canny, guide_dir;
  std::optional<std::string> guide_psi;
  std::vector<int> guide_size;
  guide->add_option("--pairings", guide_pairings)->required();
  guide->add_option("--canny-in", guide_canny)->required()->check(CLI::ExistingFile);
  guide->add_option("--psi-in", guide_psi)->check(CLI::ExistingFile);
  guide->add_option("--size", guide_size, "Output canvas W H (default: input edge map size)")
      ->expected(2);
  guide->add_option("--out-dir", guide_dir)->required();

  // swd
  auto* swd = app.add_subcommand("swd", "Sliced Wasserstein distance between feature sets");
  std::string swd_a, swd_b;
  std::optional<std::size_t> swd_proj;
  std::optional<std::uint64_t> swd_seed;
  swd->add_option("--a", swd_a)->required()->check(CLI::ExistingFile);
  swd->add_option("--b", swd_b)->required()->check(CLI::ExistingFile);
  swd->add_option("--projections", swd_proj)->check(CLI::PositiveNumber);
  swd->add_option("--seed", swd_seed);

  // run
  auto* run = app.add_subcommand("run", "Run the whole pipeline");
  PipelineInputs run_inputs;
  std::string run_in, run_dir;
  std::optional<std::string> run_out, run_script, run_image, run_psi;
  std::optional<int> run_res;
  std::optional<std::uint64_t> run_seed;
  bool run_preserve = false;
  run->add_option("--in", run_in)->required();
  auto* run_out_opt = run->add_option("--out", run_out, "Output procedure");
  run->add_option("--script", run_script, "Edit script applied to --in")->excludes(run_out_opt);
  run->add_option("--image", run_image);
  run->add_option("--psi", run_psi);
  run->add_option("--resolution", run_res);
  run->add_option("--seed", run_seed);
  run->add_option("--out-dir", run_dir)->required();
  run->add_flag("--preserve-extent", run_preserve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  std::string stage = "config";
  try {
    PipelineConfig config = load_config(config_path);
    const CategoryRegistry registry = config.registry();

    if (*parse) {
      stage = "parse";
      const Procedure p = parse_procedure(read_text_file(parse_in), registry);
      const std::string text = serialize_procedure(p);
      if (parse_out) write_text_file(*parse_out, text);
      else std::cout << text;
    } else if (*edit) {
      stage = "parse";
      const Procedure p = parse_procedure(read_text_file(edit_in), registry);
      const auto ops = parse_edit_script(read_text_file(edit_script));
      stage = "edit";
      const Procedure out = apply_edits(p, ops, {edit_preserve || config.preserve_extent});
      stage = "write";
      write_text_file(edit_out, serialize_procedure(out));
      spdlog::info("{}", diff_procedures(p, out).to_text());
    } else if (*diff) {
      stage = "parse";
      const Procedure a = parse_procedure(read_text_file(diff_a), registry);
      const Procedure b = parse_procedure(read_text_file(diff_b), registry);
      stage = "diff";
      const DiffReport report = diff_procedures(a, b);
      if (diff_json) std::cout << report.to_json().dump(2) << '\n';
      else std::cout << report.to_text();
    } else if (*expand_cmd) {
      stage = "parse";
      const Procedure p = parse_procedure(read_text_file(expand_in), registry);
      stage = "expand";
      const SymbolTree t = expand(p);
      stage = "write";
      write_text_file(expand_out, t.to_json().dump(2) + "\n");
    } else if (*raster) {
      stage = "parse";
      const SymbolTree t = load_tree(raster_in, registry);
      stage = "rasterize";
      const int w = raster_res ? *raster_res : t.image_size().width;
      const int h = raster_res ? *raster_res : t.image_size().height;
      const Raster r = rasterize(t, w, h);
      stage = "write";
      write_raster(raster_out, r);
    } else if (*canny_cmd) {
      stage = "parse";
      const Raster img = read_image(canny_image);
      CannyParams params = config.canny;
      if (canny_sigma) params.sigma = *canny_sigma;
      if (canny_low) params.low_threshold = *canny_low;
      if (canny_high) params.high_threshold = *canny_high;
      stage = "canny";
      const Raster edges = canny(img, params);
      stage = "write";
      write_raster(canny_out, edges);
    } else if (*match) {
      stage = "parse";
      const SymbolTree t_in = load_tree(match_in, registry);
      const SymbolTree t_out = load_tree(match_out, registry);
      if (match_res) config.resolution = *match_res;
      config.validate();
      stage = "rasterize";
      const int n = config.resolution;
      const Raster seg_in = rasterize(t_in, n, n);
      const Raster seg_out = rasterize(t_out, n, n);
      stage = "match";
      const PairingList list = match_trees(t_in, t_out, seg_in, seg_out, config.metric);
      for (const auto& p : list.pairings)
        if (!p.in_symbol) spdlog::warn("symbol {} ({}) is unmatched", p.out_symbol, p.category);
      stage = "write";
      json j = list.to_json();
      j["config_digest"] = config.digest();
      write_text_file(match_emit, j.dump(2) + "\n");
      spdlog::info("{} pairings, total score {}, {} unmatched", list.pairings.size(),
                   list.total_score(), list.unmatched_count());
    } else if (*explain) {
      stage = "parse";
      const PairingList list = PairingList::from_json(json::parse(read_text_file(explain_pairings)));
      stage = "explain";
      const PairingExplanation e = explain_pairing(list, explain_symbol);
      if (explain_json) std::cout << e.to_json().dump(2) << '\n';
      else std::cout << e.to_text();
    } else if (*guide) {
      stage = "parse";
      const PairingList list = PairingList::from_json(json::parse(read_text_file(guide_pairings)));
      const Raster c_in = read_image(guide_canny);
      const auto psi_in = guide_psi ? read_act(*guide_psi) : std::vector<ActivationGrid>{};
      stage = "guide";
      const Size target = guide_size.empty() ? c_in.size() : Size{guide_size[0], guide_size[1]};
      GuidanceBundle bundle = build_bundle(c_in, psi_in, list, target);
      for (const auto& p : list.pairings)
        if (p.terminal && !p.in_symbol)
          spdlog::warn("symbol {} ({}) is unmatched; its region stays empty", p.out_symbol,
                       p.category);
      stage = "write";
      export_bundle(bundle, guide_dir);
    } else if (*swd) {
      stage = "parse";
      const FeatureSet a = FeatureSet::normalized(load_features(swd_a));
      const FeatureSet b = FeatureSet::normalized(load_features(swd_b));
      stage = "swd";
      const double d = sliced_wasserstein(a, b, swd_proj.value_or(config.swd_projections),
                                          swd_seed.value_or(config.seed));
      std::cout << json(d).dump() << '\n';
    } else if (*run) {
      if (run_res) config.resolution = *run_res;
      if (run_seed) config.seed = *run_seed;
      if (run_preserve) config.preserve_extent = true;
      run_inputs.p_in = run_in;
      if (run_out) run_inputs.p_out = fs::path(*run_out);
      if (run_script) run_inputs.edit_script = fs::path(*run_script);
      if (run_image) run_inputs.image = fs::path(*run_image);
      if (run_psi) run_inputs.psi = fs::path(*run_psi);
      const PipelineResult result = run_pipeline(run_inputs, config, run_dir);
      for (const auto& w : result.warnings) spdlog::warn("{}", w);
      spdlog::info("wrote {} artifacts to {} (total score {}, {} unmatched)",
                   result.artifacts.size(), result.out_dir.string(), result.total_score,
                   result.unmatched);
    }
  } catch (const StageError& e) {
    return fail(e.stage(), e.what());
  } catch (const std::exception& e) {
    return fail(stage, e.what());
  }
  return 0;
}
