#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "prodg/raster.hpp"

namespace prodg {

/// 8-bit gray or RGB PNG (palette, 16-bit and alpha are reduced), or binary /
/// ASCII PGM.
Raster read_image(const std::filesystem::path& path);

/// Writes a PNG with optional tEXt entries. Output bytes depend only on the
/// raster and the text.
void write_png(const std::filesystem::path& path, const Raster& raster,
               const std::map<std::string, std::string>& text = {});

void write_pgm(const std::filesystem::path& path, const Raster& raster);

}  // namespace prodg
