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
#include "seldedge/nn/spec.hpp"
#include "seldedge/rng.hpp"

namespace seldedge {

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t count() const {
    std::size_t n = 1;
    for (std::uint32_t d : dims) n *= d;
    return n;
  }
};

// Binary weight container: magic "NNWF", u32 version, u32 tensor count;
// per tensor: u16 name length + UTF-8 name, u8 dtype (0 = f32), u8 rank,
// u32 dims[rank], raw little-endian f32 data. Trailing bytes forbidden.
struct WeightFile {
  std::vector<Tensor> tensors;

  const Tensor* find(const std::string& name) const {
    for (const Tensor& t : tensors)
      if (t.name == name) return &t;
    return nullptr;
  }

  Tensor& add(const std::string& name, std::vector<std::uint32_t> dims) {
    Tensor t;
    t.name = name;
    t.dims = std::move(dims);
    t.data.assign(t.count(), 0.0f);
    tensors.push_back(std::move(t));
    return tensors.back();
  }

  std::size_t total_params() const {
    std::size_t n = 0;
    for (const Tensor& t : tensors) n += t.count();
    return n;
  }

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
    f.write("NNWF", 4);
    put_u32(1);
    put_u32(static_cast<std::uint32_t>(tensors.size()));
    for (const Tensor& t : tensors) {
      if (t.name.size() > 0xffff) fail(Errc::invalid_argument, "tensor name too long");
      const std::uint8_t nl[2] = {static_cast<std::uint8_t>(t.name.size() & 0xff),
                                  static_cast<std::uint8_t>((t.name.size() >> 8) & 0xff)};
      f.write(reinterpret_cast<const char*>(nl), 2);
      f.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
      const std::uint8_t dtype = 0, rank = static_cast<std::uint8_t>(t.dims.size());
      f.write(reinterpret_cast<const char*>(&dtype), 1);
      f.write(reinterpret_cast<const char*>(&rank), 1);
      for (std::uint32_t d : t.dims) put_u32(d);
      f.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!f) fail(Errc::io_error, "short write: " + path);
  }

  static WeightFile read(const std::string& path) {
    const std::vector<std::uint8_t> b = read_file_bytes(path);
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
      if (pos + n > b.size()) fail(Errc::format_error, "truncated weight file: " + path);
    };
    auto get_u32 = [&] {
      need(4);
      const std::uint32_t v = static_cast<std::uint32_t>(b[pos]) |
                              (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
                              (static_cast<std::uint32_t>(b[pos + 2]) << 16) |
                              (static_cast<std::uint32_t>(b[pos + 3]) << 24);
      pos += 4;
      return v;
    };
    need(4);
    if (std::memcmp(b.data(), "NNWF", 4) != 0)
      fail(Errc::format_error, "not a weight file: " + path);
    pos = 4;
    if (get_u32() != 1) fail(Errc::format_error, "unsupported weight file version: " + path);
    const std::uint32_t count = get_u32();
    WeightFile wf;
    for (std::uint32_t k = 0; k < count; ++k) {
      need(2);
      const std::size_t name_len = b[pos] | (b[pos + 1] << 8);
      pos += 2;
      need(name_len);
      Tensor t;
      t.name.assign(reinterpret_cast<const char*>(b.data() + pos), name_len);
      pos += name_len;
      need(2);
      const std::uint8_t dtype = b[pos], rank = b[pos + 1];
      pos += 2;
      if (dtype != 0) fail(Errc::format_error, "unsupported dtype in " + path);
      t.dims.resize(rank);
      for (std::uint8_t r = 0; r < rank; ++r) t.dims[r] = get_u32();
      const std::size_t n = t.count();
      need(n * sizeof(float));
      t.data.resize(n);
      std::memcpy(t.data.data(), b.data() + pos, n * sizeof(float));
      pos += n * sizeof(float);
      wf.tensors.push_back(std::move(t));
    }
    if (pos != b.size()) fail(Errc::format_error, "trailing bytes in weight file: " + path);
    return wf;
  }
};

// Canonical tensor set for a composed spec. Layer i contributes:
//   conv    l{i}.weight [out_c, in_c, kh, kw], l{i}.bias [out_c]
//   bn      l{i}.scale [C], l{i}.shift [C]   (affine + running stats, folded)
//   gru     l{i}.w_ih [3H, in], l{i}.w_hh [3H, H], l{i}.b_ih [3H], l{i}.b_hh [3H]
//           (bigru mirrors them with a ".rev" suffix; gate row order r, z, n)
//   linear  l{i}.weight [out, in], l{i}.bias [out]
inline std::vector<std::pair<std::string, std::vector<std::uint32_t>>> expected_tensors(
    const NetworkSpec& spec) {
  std::vector<std::pair<std::string, std::vector<std::uint32_t>>> out;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const std::string p = "l" + std::to_string(i);
    auto u = [](int v) { return static_cast<std::uint32_t>(v); };
    switch (l.kind) {
      case LayerKind::Conv2d:
        out.push_back({p + ".weight", {u(l.out_channels), u(l.in_c), u(l.kh), u(l.kw)}});
        if (l.bias) out.push_back({p + ".bias", {u(l.out_channels)}});
        break;
      case LayerKind::BatchNorm2d:
        out.push_back({p + ".scale", {u(l.in_c)}});
        out.push_back({p + ".shift", {u(l.in_c)}});
        break;
      case LayerKind::Gru:
      case LayerKind::BiGru: {
        const int h = l.hidden;
        const int dirs = l.kind == LayerKind::BiGru ? 2 : 1;
        for (int d = 0; d < dirs; ++d) {
          const std::string sfx = d == 0 ? "" : ".rev";
          out.push_back({p + ".w_ih" + sfx, {u(3 * h), u(l.in_dim)}});
          out.push_back({p + ".w_hh" + sfx, {u(3 * h), u(h)}});
          if (l.bias) {
            out.push_back({p + ".b_ih" + sfx, {u(3 * h)}});
            out.push_back({p + ".b_hh" + sfx, {u(3 * h)}});
          }
        }
        break;
      }
      case LayerKind::Linear:
        out.push_back({p + ".weight", {u(l.out_dim), u(l.in_dim)}});
        if (l.bias) out.push_back({p + ".bias", {u(l.out_dim)}});
        break;
      default:
        break;
    }
  }
  return out;
}

// Weights must carry exactly the spec's tensors (any order), with matching
// shapes and finite values.
inline void validate_weights(const NetworkSpec& spec, const WeightFile& wf) {
  const auto expected = expected_tensors(spec);
  if (expected.size() != wf.tensors.size())
    fail(Errc::data_error, "weight file tensor count does not match the network spec");
  for (const auto& [name, dims] : expected) {
    const Tensor* t = wf.find(name);
    if (!t) fail(Errc::data_error, "missing tensor: " + name);
    if (t->dims != dims) fail(Errc::data_error, "tensor shape mismatch: " + name);
    for (float v : t->data)
      if (!std::isfinite(v)) fail(Errc::data_error, "non-finite value in tensor: " + name);
  }
}

// Zero-initialized weight set matching a spec (BN scale set to 1).
inline WeightFile zero_weights(const NetworkSpec& spec) {
  WeightFile wf;
  for (const auto& [name, dims] : expected_tensors(spec)) {
    Tensor& t = wf.add(name, dims);
    if (name.size() > 6 && name.compare(name.size() - 6, 6, ".scale") == 0)
      std::fill(t.data.begin(), t.data.end(), 1.0f);
  }
  return wf;
}

// Deterministic random weights, uniform in a ±1/sqrt(fan_in) range per
// tensor (BN scale around 1, shifts and biases small).
inline WeightFile random_weights(const NetworkSpec& spec, std::uint64_t seed) {
  WeightFile wf;
  std::uint64_t idx = 0;
  for (const auto& [name, dims] : expected_tensors(spec)) {
    Tensor& t = wf.add(name, dims);
    Rng rng(derive_seed(seed, idx++));
    const bool is_scale = name.size() > 6 && name.compare(name.size() - 6, 6, ".scale") == 0;
    if (is_scale) {
      for (float& v : t.data) v = static_cast<float>(1.0 + rng.uniform(-0.1, 0.1));
    } else if (dims.size() < 2) {
      for (float& v : t.data) v = static_cast<float>(rng.uniform(-0.1, 0.1));
    } else {
      const double fan_in = static_cast<double>(t.count()) / dims[0];
      const double bound = 1.0 / std::sqrt(fan_in);
      for (float& v : t.data) v = static_cast<float>(rng.uniform(-bound, bound));
    }
  }
  return wf;
}

}  // namespace seldedge
