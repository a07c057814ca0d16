// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "seldedge/audio.hpp"
#include "seldedge/common.hpp"

namespace seldedge {

// RIFF/WAVE with IEEE float32 samples (format tag 3). Interleaved on disk,
// channel-major in memory.
namespace wavdetail {

inline void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

inline void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

inline void put_tag(std::vector<std::uint8_t>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace wavdetail

inline void write_wav(const std::string& path, const AudioClip& clip) {
  clip.check();
  using namespace wavdetail;
  const std::uint32_t n_frames = static_cast<std::uint32_t>(clip.length);
  const std::uint16_t n_ch = static_cast<std::uint16_t>(clip.channels);
  const std::uint32_t data_bytes = n_frames * n_ch * 4u;

  std::vector<std::uint8_t> b;
  b.reserve(58 + data_bytes);
  put_tag(b, "RIFF");
  put_u32(b, 4 + (8 + 16) + (8 + 4) + (8 + data_bytes));
  put_tag(b, "WAVE");

  put_tag(b, "fmt ");
  put_u32(b, 16);
  put_u16(b, 3);  // IEEE float
  put_u16(b, n_ch);
  put_u32(b, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(b, static_cast<std::uint32_t>(clip.sample_rate) * n_ch * 4u);  // byte rate
  put_u16(b, static_cast<std::uint16_t>(n_ch * 4u));                     // block align
  put_u16(b, 32);                                                        // bits per sample

  put_tag(b, "fact");
  put_u32(b, 4);
  put_u32(b, n_frames);

  put_tag(b, "data");
  put_u32(b, data_bytes);
  std::size_t off = b.size();
  b.resize(off + data_bytes);
  // interleave
  for (std::uint32_t i = 0; i < n_frames; ++i) {
    for (std::uint16_t c = 0; c < n_ch; ++c) {
      float v = clip.at(c, static_cast<int>(i));
      std::memcpy(b.data() + off, &v, 4);
      off += 4;
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::io_error, "cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!f) fail(Errc::io_error, "short write: " + path);
}

inline AudioClip read_wav(const std::string& path) {
  using namespace wavdetail;
  std::vector<std::uint8_t> b = read_file_bytes(path);
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 ||
      std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    fail(Errc::format_error, "not a RIFF/WAVE file: " + path);

  std::uint16_t fmt_tag = 0, n_ch = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint8_t* hdr = b.data() + pos;
    std::uint32_t chunk_len = get_u32(hdr + 4);
    std::size_t body = pos + 8;
    if (body + chunk_len > b.size()) fail(Errc::format_error, "truncated chunk in " + path);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16) fail(Errc::format_error, "fmt chunk too short in " + path);
      fmt_tag = get_u16(b.data() + body);
      n_ch = get_u16(b.data() + body + 2);
      rate = get_u32(b.data() + body + 4);
      bits = get_u16(b.data() + body + 14);
      if (fmt_tag == 0xfffe && chunk_len >= 40)  // WAVE_FORMAT_EXTENSIBLE: subformat GUID
        fmt_tag = get_u16(b.data() + body + 24);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = b.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!data) fail(Errc::format_error, "no data chunk in " + path);
  if (fmt_tag != 3 || bits != 32)
    fail(Errc::format_error, "expected 32-bit float WAV: " + path);
  if (n_ch == 0 || rate == 0) fail(Errc::format_error, "bad fmt fields in " + path);

  const std::uint32_t frame_bytes = n_ch * 4u;
  const std::uint32_t n_frames = data_len / frame_bytes;
  AudioClip clip = AudioClip::zeros(n_ch, static_cast<int>(n_frames), static_cast<int>(rate));
  for (std::uint32_t i = 0; i < n_frames; ++i) {
    for (std::uint16_t c = 0; c < n_ch; ++c) {
      float v;
      std::memcpy(&v, data + static_cast<std::size_t>(i) * frame_bytes + c * 4u, 4);
      clip.at(c, static_cast<int>(i)) = v;
    }
  }
  return clip;
}

}  // namespace seldedge
