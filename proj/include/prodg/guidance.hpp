#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "prodg/matching.hpp"
#include "prodg/raster.hpp"

namespace prodg {

/// Named C x H x W float grid, channel-major then row-major.
struct ActivationGrid {
  std::string name;
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  ActivationGrid() = default;
  ActivationGrid(std::string n, int c, int h, int w, float fill = 0.0f)
      : name(std::move(n)),
        channels(c),
        height(h),
        width(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}

  float& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  Size size() const { return {width, height}; }
  friend bool operator==(const ActivationGrid&, const ActivationGrid&) = default;
};

struct GuidanceWarning {
  SymbolId out_symbol = 0;
  std::string message;
};

struct CannyOut {
  Raster canny;
  /// Per-pixel number of writes.
  Raster coverage;
  std::vector<GuidanceWarning> warnings;
};

struct GuidanceBundle {
  Raster canny_out;
  std::vector<ActivationGrid> activations_out;
  std::string pairing_hash;
  Raster coverage_mask;
  /// Echoed into the manifest; not interpreted.
  nlohmann::json config = nlohmann::json::object();

  friend bool operator==(const GuidanceBundle&, const GuidanceBundle&) = default;
};

/// Resamples `src` (w x h doubles) to the target size, bilinear with
/// pixel-centre alignment. Equal sizes copy exactly.
std::vector<double> resample_region(std::span<const double> src, int sw, int sh, int tw, int th);

/// For every matched terminal: crop c_in at the input region, resample to the
/// output region's pixel size and re-binarize at 128. Unmatched terminals stay
/// zero, keep coverage 0 and produce a warning.
CannyOut build_canny_out(const Raster& c_in, const PairingList& pairings, Size target);

/// Same transplant per grid and channel at each grid's own resolution, without
/// re-binarization. Target rects thinner than one cell still get one cell.
std::vector<ActivationGrid> build_activations_out(const std::vector<ActivationGrid>& psi_in,
                                                  const PairingList& pairings,
                                                  std::vector<GuidanceWarning>* warnings = nullptr);

std::string pairing_hash(const PairingList& pairings);

GuidanceBundle build_bundle(const Raster& c_in, const std::vector<ActivationGrid>& psi_in,
                            const PairingList& pairings, Size target);

// ------------------------------------------------------------ .act container

/// "PDGACT1\0", u32 entry count, then per entry: u16 name length, UTF-8 name,
/// u32 C, H, W and C*H*W float32 values. All integers and floats little-endian.
std::string encode_act(const std::vector<ActivationGrid>& grids);
std::vector<ActivationGrid> decode_act(std::string_view bytes);
void write_act(const std::filesystem::path& path, const std::vector<ActivationGrid>& grids);
std::vector<ActivationGrid> read_act(const std::filesystem::path& path);

/// Writes canny_out.png, coverage_mask.png, psi_out.act and bundle.json into `dir`.
void export_bundle(const GuidanceBundle& bundle, const std::filesystem::path& dir);
GuidanceBundle import_bundle(const std::filesystem::path& dir);

}  // namespace prodg
