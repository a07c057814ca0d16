// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "seldedge/common.hpp"

namespace seldedge {

enum class FeatureLayout : std::uint8_t {
  AscLogMel = 0,      // 1 × frames × n_mels, hop 800 samples
  SeldSalsaLite = 1,  // 7 × frames × bins, hop 300 samples
};

inline const char* layout_name(FeatureLayout l) {
  switch (l) {
    case FeatureLayout::AscLogMel: return "ASC_LOGMEL";
    case FeatureLayout::SeldSalsaLite: return "SELD_SALSA_LITE";
  }
  fail(Errc::invalid_argument, "bad feature layout tag");
}

// channels × frames × bins float tensor, row-major.
struct FeatureTensor {
  FeatureLayout layout = FeatureLayout::AscLogMel;
  int channels = 0;
  int frames = 0;
  int bins = 0;
  double frame_hop_s = 0.0;
  std::vector<float> data;

  static FeatureTensor zeros(FeatureLayout layout, int channels, int frames, int bins,
                             double frame_hop_s) {
    FeatureTensor t;
    t.layout = layout;
    t.channels = channels;
    t.frames = frames;
    t.bins = bins;
    t.frame_hop_s = frame_hop_s;
    t.data.assign(static_cast<std::size_t>(channels) * frames * bins, 0.0f);
    return t;
  }

  float& at(int c, int t, int b) {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + b];
  }
  float at(int c, int t, int b) const {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + b];
  }

  void check_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) fail(Errc::data_error, "non-finite value in feature tensor");
  }

  // Flat binary container: magic "FTNS", u32 version, u8 layout tag,
  // u32 dims[3], little-endian float32 payload.
  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::io_error, "cannot open for writing: " + path);
    auto put_u32 = [&](std::uint32_t v) {
      std::uint8_t b[4] = {static_cast<std::uint8_t>(v & 0xff),
                           static_cast<std::uint8_t>((v >> 8) & 0xff),
                           static_cast<std::uint8_t>((v >> 16) & 0xff),
                           static_cast<std::uint8_t>((v >> 24) & 0xff)};
      f.write(reinterpret_cast<const char*>(b), 4);
    };
    f.write("FTNS", 4);
    put_u32(1);
    const std::uint8_t tag = static_cast<std::uint8_t>(layout);
    f.write(reinterpret_cast<const char*>(&tag), 1);
    put_u32(static_cast<std::uint32_t>(channels));
    put_u32(static_cast<std::uint32_t>(frames));
    put_u32(static_cast<std::uint32_t>(bins));
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!f) fail(Errc::io_error, "short write: " + path);
  }

  static FeatureTensor read(const std::string& path) {
    const std::vector<std::uint8_t> b = read_file_bytes(path);
    if (b.size() < 21 || std::memcmp(b.data(), "FTNS", 4) != 0)
      fail(Errc::format_error, "not a feature tensor file: " + path);
    auto get_u32 = [&](std::size_t off) {
      return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
             (static_cast<std::uint32_t>(b[off + 2]) << 16) |
             (static_cast<std::uint32_t>(b[off + 3]) << 24);
    };
    if (get_u32(4) != 1) fail(Errc::format_error, "unsupported feature tensor version: " + path);
    const std::uint8_t tag = b[8];
    if (tag > 1) fail(Errc::format_error, "unknown feature layout tag: " + path);
    const FeatureLayout layout = static_cast<FeatureLayout>(tag);
    const std::uint32_t channels = get_u32(9), frames = get_u32(13), bins = get_u32(17);
    const std::size_t count = static_cast<std::size_t>(channels) * frames * bins;
    if (b.size() != 21 + count * sizeof(float))
      fail(Errc::format_error, "feature tensor size mismatch: " + path);
    // hop is implied by the layout contract (24 kHz clips)
    const double hop_s = layout == FeatureLayout::AscLogMel ? 800.0 / 24000.0 : 300.0 / 24000.0;
    FeatureTensor t = zeros(layout, static_cast<int>(channels), static_cast<int>(frames),
                            static_cast<int>(bins), hop_s);
    std::memcpy(t.data.data(), b.data() + 21, count * sizeof(float));
    return t;
  }
};

}  // namespace seldedge
