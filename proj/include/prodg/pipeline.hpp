#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prodg/error.hpp"
#include "prodg/grammar.hpp"
#include "prodg/metrics.hpp"
#include "prodg/raster.hpp"

namespace prodg {

/// Failure of one pipeline stage; `stage()` names it for the error JSON.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }
  nlohmann::json to_json() const { return {{"error", {{"stage", stage_}, {"message", what()}}}}; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  MetricConfig metric;
  CannyParams canny;
  /// Segmentation rasters used for matching are resolution x resolution.
  int resolution = 256;
  std::uint64_t seed = 0;
  std::size_t swd_projections = kDefaultProjections;
  bool preserve_extent = false;
  /// Extra named category tables, keyed by table name.
  nlohmann::json category_tables = nlohmann::json::object();

  void validate() const;
  /// Everything that influences outputs; the output directory is not part of it.
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
  std::string digest() const;
  CategoryRegistry registry() const;
};

struct PipelineInputs {
  std::filesystem::path p_in;
  /// Either an output procedure or an edit script applied to p_in.
  std::optional<std::filesystem::path> p_out;
  std::optional<std::filesystem::path> edit_script;
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> psi;
};

struct PipelineResult {
  std::filesystem::path out_dir;
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;
  double total_score = 0.0;
  std::size_t unmatched = 0;
};

/// Writes tree_in.json, tree_out.json, p_out.json, seg_in.png, seg_out.png,
/// canny_in.png, pairings.json, canny_out.png, coverage_mask.png, psi_out.act
/// (when psi is given) and manifest.json into out_dir. Throws StageError.
PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config,
                            const std::filesystem::path& out_dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace prodg
