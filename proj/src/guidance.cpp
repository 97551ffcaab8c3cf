#include "prodg/guidance.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "prodg/digest.hpp"
#include "prodg/error.hpp"
#include "prodg/image_io.hpp"
#include "prodg/kernels.hpp"

namespace prodg {

namespace {

std::vector<double> crop_luma(const Raster& gray, const PixelRect& r) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r.area()));
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) out.push_back(gray.at(x, y));
  return out;
}

std::vector<double> crop_channel(const ActivationGrid& g, int c, const PixelRect& r) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r.area()));
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) out.push_back(g.at(c, y, x));
  return out;
}

std::string unmatched_message(const Pairing& p) {
  return "terminal " + std::to_string(p.out_symbol) + " (" + p.category +
         ") has no source region; guidance left empty";
}

}  // namespace

std::vector<double> resample_region(std::span<const double> src, int sw, int sh, int tw, int th) {
  if (sw < 1 || sh < 1 || tw < 1 || th < 1) throw Error("resample sizes must be positive");
  if (src.size() != static_cast<std::size_t>(sw) * sh) throw Error("resample source size mismatch");
  std::vector<double> dst(static_cast<std::size_t>(tw) * th);
  kernels::parallel::resample_bilinear({src, sw, sh}, tw, th, dst);
  return dst;
}

CannyOut build_canny_out(const Raster& c_in, const PairingList& pairings, Size target) {
  if (target.width < 1 || target.height < 1) throw Error("target size must be positive");
  const Raster gray = to_luma(c_in);
  CannyOut out{Raster(target.width, target.height, 1), Raster(target.width, target.height, 1), {}};

  for (const Pairing& p : pairings.pairings) {
    if (!p.terminal) continue;
    const PixelRect dst = to_pixels(p.out_region, target);
    if (!p.in_region) {
      out.warnings.push_back({p.out_symbol, unmatched_message(p)});
      continue;
    }
    if (dst.empty()) continue;
    const PixelRect src = to_pixels_collapsed(*p.in_region, gray.size());
    const auto values =
        resample_region(crop_luma(gray, src), src.width(), src.height(), dst.width(), dst.height());
    for (int y = 0; y < dst.height(); ++y) {
      for (int x = 0; x < dst.width(); ++x) {
        const double v = values[static_cast<std::size_t>(y) * dst.width() + x];
        out.canny.at(dst.x0 + x, dst.y0 + y) = v >= 128.0 ? 255 : 0;
        ++out.coverage.at(dst.x0 + x, dst.y0 + y);
      }
    }
  }
  return out;
}

std::vector<ActivationGrid> build_activations_out(const std::vector<ActivationGrid>& psi_in,
                                                  const PairingList& pairings,
                                                  std::vector<GuidanceWarning>* warnings) {
  for (const auto& g : psi_in) {
    if (g.channels < 1 || g.height < 1 || g.width < 1)
      throw Error("activation grid \"" + g.name + "\" has an empty shape");
    for (float v : g.data)
      if (!std::isfinite(v)) throw Error("activation grid \"" + g.name + "\" has non-finite values");
  }
  if (warnings)
    for (const Pairing& p : pairings.pairings)
      if (p.terminal && !p.in_region) warnings->push_back({p.out_symbol, unmatched_message(p)});

  std::vector<ActivationGrid> out;
  for (const auto& g : psi_in) {
    ActivationGrid o(g.name, g.channels, g.height, g.width);
    for (const Pairing& p : pairings.pairings) {
      if (!p.terminal || !p.in_region) continue;
      const PixelRect dst = to_pixels_collapsed(p.out_region, g.size());
      const PixelRect src = to_pixels_collapsed(*p.in_region, g.size());
      for (int c = 0; c < g.channels; ++c) {
        const auto values = resample_region(crop_channel(g, c, src), src.width(), src.height(),
                                            dst.width(), dst.height());
        for (int y = 0; y < dst.height(); ++y)
          for (int x = 0; x < dst.width(); ++x)
            o.at(c, dst.y0 + y, dst.x0 + x) =
                static_cast<float>(values[static_cast<std::size_t>(y) * dst.width() + x]);
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::string pairing_hash(const PairingList& pairings) {
  return sha256_hex(pairings.to_json().dump());
}

GuidanceBundle build_bundle(const Raster& c_in, const std::vector<ActivationGrid>& psi_in,
                            const PairingList& pairings, Size target) {
  CannyOut c = build_canny_out(c_in, pairings, target);
  GuidanceBundle b;
  b.canny_out = std::move(c.canny);
  b.coverage_mask = std::move(c.coverage);
  b.activations_out = build_activations_out(psi_in, pairings);
  b.pairing_hash = pairing_hash(pairings);
  b.config = pairings.config.to_json();
  return b;
}

// ------------------------------------------------------------ .act container

namespace {

constexpr char kActMagic[8] = {'P', 'D', 'G', 'A', 'C', 'T', '1', '\0'};

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("malformed .act container: truncated");
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint16_t u16() {
    auto s = take(2);
    return static_cast<std::uint16_t>(static_cast<unsigned char>(s[0]) |
                                      (static_cast<unsigned char>(s[1]) << 8));
  }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_act(const std::vector<ActivationGrid>& grids) {
  std::string out(kActMagic, sizeof kActMagic);
  put_u32(out, static_cast<std::uint32_t>(grids.size()));
  for (const auto& g : grids) {
    if (g.name.size() > 0xffff) throw FormatError("activation name longer than 65535 bytes");
    if (g.data.size() != static_cast<std::size_t>(g.channels) * g.height * g.width)
      throw FormatError("activation grid \"" + g.name + "\" has inconsistent data size");
    put_u16(out, static_cast<std::uint16_t>(g.name.size()));
    out += g.name;
    put_u32(out, static_cast<std::uint32_t>(g.channels));
    put_u32(out, static_cast<std::uint32_t>(g.height));
    put_u32(out, static_cast<std::uint32_t>(g.width));
    for (float f : g.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      put_u32(out, bits);
    }
  }
  return out;
}

std::vector<ActivationGrid> decode_act(std::string_view bytes) {
  Reader r(bytes);
  if (r.remaining() < sizeof kActMagic || r.take(sizeof kActMagic) != std::string_view(kActMagic, 8))
    throw FormatError("malformed .act container: bad magic");
  const std::uint32_t count = r.u32();
  std::vector<ActivationGrid> grids;
  for (std::uint32_t e = 0; e < count; ++e) {
    ActivationGrid g;
    g.name = std::string(r.take(r.u16()));
    const std::uint32_t c = r.u32(), h = r.u32(), w = r.u32();
    if (c == 0 || h == 0 || w == 0 || c > 0x7fffffff || h > 0x7fffffff || w > 0x7fffffff)
      throw FormatError("malformed .act container: empty or oversized grid \"" + g.name + "\"");
    const unsigned __int128 n = static_cast<unsigned __int128>(c) * h * w;
    if (n * 4 > r.remaining()) throw FormatError("malformed .act container: truncated");
    g.channels = static_cast<int>(c);
    g.height = static_cast<int>(h);
    g.width = static_cast<int>(w);
    g.data.resize(static_cast<std::size_t>(n));
    for (float& f : g.data) {
      const std::uint32_t bits = r.u32();
      std::memcpy(&f, &bits, sizeof f);
    }
    grids.push_back(std::move(g));
  }
  if (r.remaining() != 0) throw FormatError("malformed .act container: trailing bytes");
  return grids;
}

void write_act(const std::filesystem::path& path, const std::vector<ActivationGrid>& grids) {
  const std::string bytes = encode_act(grids);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<ActivationGrid> read_act(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_act(bytes);
}

void export_bundle(const GuidanceBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::map<std::string, std::string> text{{"prodg-pairing-hash", bundle.pairing_hash}};
  write_png(dir / "canny_out.png", bundle.canny_out, text);
  write_png(dir / "coverage_mask.png", bundle.coverage_mask, text);
  nlohmann::json files = {{"canny_out.png", sha256_file(dir / "canny_out.png")},
                          {"coverage_mask.png", sha256_file(dir / "coverage_mask.png")}};
  if (!bundle.activations_out.empty()) {
    write_act(dir / "psi_out.act", bundle.activations_out);
    files["psi_out.act"] = sha256_file(dir / "psi_out.act");
  }
  const nlohmann::json manifest = {
      {"pairing_hash", bundle.pairing_hash}, {"config", bundle.config}, {"files", files}};
  std::ofstream out(dir / "bundle.json");
  if (!out) throw IoError("cannot write " + (dir / "bundle.json").string());
  out << manifest.dump(2) << '\n';
}

GuidanceBundle import_bundle(const std::filesystem::path& dir) {
  std::ifstream in(dir / "bundle.json");
  if (!in) throw IoError("cannot open " + (dir / "bundle.json").string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed bundle manifest: ") + e.what());
  }
  GuidanceBundle b;
  b.pairing_hash = manifest.value("pairing_hash", std::string());
  b.config = manifest.value("config", nlohmann::json::object());
  b.canny_out = read_image(dir / "canny_out.png");
  b.coverage_mask = read_image(dir / "coverage_mask.png");
  if (std::filesystem::exists(dir / "psi_out.act")) b.activations_out = read_act(dir / "psi_out.act");
  return b;
}

}  // namespace prodg
