// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seldedge/common.hpp"

namespace seldedge {

enum class LayerKind {
  Conv2d,
  BatchNorm2d,
  ReLU,
  MaxPool2d,
  Gru,
  BiGru,
  Linear,
  Tanh,
  Sigmoid,
  FlattenFreq,
};

inline const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Conv2d: return "conv";
    case LayerKind::BatchNorm2d: return "bn";
    case LayerKind::ReLU: return "relu";
    case LayerKind::MaxPool2d: return "pool";
    case LayerKind::Gru: return "gru";
    case LayerKind::BiGru: return "bigru";
    case LayerKind::Linear: return "linear";
    case LayerKind::Tanh: return "tanh";
    case LayerKind::Sigmoid: return "sigmoid";
    case LayerKind::FlattenFreq: return "flatten";
  }
  fail(Errc::invalid_argument, "bad layer kind");
}

struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  int out_channels = 0;  // Conv2d
  int kh = 0, kw = 0;    // Conv2d kernel
  int pool_t = 0, pool_f = 0;
  int hidden = 0;   // GRU / BiGRU
  int out_dim = 0;  // Linear
  bool bias = true;

  // filled by NetworkSpec::compose()
  int in_c = 0, in_t = 0, in_f = 0;  // spatial-mode input dims
  int in_dim = 0, steps = 0;         // sequence-mode input dims
};

enum class OutputContract { Accdoa2D, SceneLogits };

// Ordered layer stack plus the input layout; compose() propagates shapes and
// validates that consecutive layers fit together.
struct NetworkSpec {
  int in_channels = 0, in_frames = 0, in_bins = 0;
  OutputContract output = OutputContract::Accdoa2D;
  std::vector<LayerSpec> layers;

  // composition results
  int out_frames = 0;
  int out_dim = 0;
  int time_stride = 1;  // product of temporal pool strides

  void compose() {
    if (in_channels < 1 || in_frames < 1 || in_bins < 1)
      fail(Errc::invalid_argument, "network: input layout not set");
    bool spatial = true;
    int c = in_channels, t = in_frames, f = in_bins;
    int dim = 0, steps = 0;
    time_stride = 1;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      LayerSpec& l = layers[i];
      const std::string where = "layer " + std::to_string(i) + " (" +
                                layer_kind_name(l.kind) + ")";
      auto need_spatial = [&] {
        if (!spatial) fail(Errc::invalid_argument, where + ": requires unflattened input");
      };
      auto need_sequence = [&] {
        if (spatial) fail(Errc::invalid_argument, where + ": requires flattened input");
      };
      switch (l.kind) {
        case LayerKind::Conv2d:
          need_spatial();
          if (l.out_channels < 1 || l.kh < 1 || l.kw < 1 || l.kh % 2 == 0 || l.kw % 2 == 0)
            fail(Errc::invalid_argument, where + ": kernel dims must be odd and positive");
          l.in_c = c;
          l.in_t = t;
          l.in_f = f;
          c = l.out_channels;  // "same" padding keeps t × f
          break;
        case LayerKind::BatchNorm2d:
          need_spatial();
          l.in_c = c;
          l.in_t = t;
          l.in_f = f;
          break;
        case LayerKind::MaxPool2d:
          need_spatial();
          if (l.pool_t < 1 || l.pool_f < 1)
            fail(Errc::invalid_argument, where + ": pool dims must be positive");
          l.in_c = c;
          l.in_t = t;
          l.in_f = f;
          t /= l.pool_t;  // floor, remainder dropped
          f /= l.pool_f;
          time_stride *= l.pool_t;
          if (t < 1 || f < 1) fail(Errc::invalid_argument, where + ": pools input away");
          break;
        case LayerKind::FlattenFreq:
          need_spatial();
          l.in_c = c;
          l.in_t = t;
          l.in_f = f;
          spatial = false;
          dim = c * f;
          steps = t;
          break;
        case LayerKind::Gru:
        case LayerKind::BiGru:
          need_sequence();
          if (l.hidden < 1) fail(Errc::invalid_argument, where + ": hidden size must be positive");
          l.in_dim = dim;
          l.steps = steps;
          dim = l.kind == LayerKind::BiGru ? 2 * l.hidden : l.hidden;
          break;
        case LayerKind::Linear:
          need_sequence();
          if (l.out_dim < 1) fail(Errc::invalid_argument, where + ": output dim must be positive");
          l.in_dim = dim;
          l.steps = steps;
          dim = l.out_dim;
          break;
        case LayerKind::ReLU:
        case LayerKind::Tanh:
        case LayerKind::Sigmoid:
          if (spatial) {
            l.in_c = c;
            l.in_t = t;
            l.in_f = f;
          } else {
            l.in_dim = dim;
            l.steps = steps;
          }
          break;
      }
    }
    if (spatial)
      fail(Errc::invalid_argument, "network: missing flatten before the output head");
    out_frames = steps;
    out_dim = dim;
    if (output == OutputContract::Accdoa2D && out_dim != 12)
      fail(Errc::invalid_argument, "network: ACCDOA head must emit 12 values per frame");
    if (output == OutputContract::SceneLogits && out_dim != 3)
      fail(Errc::invalid_argument, "network: scene head must emit 3 logits");
  }
};

// Plain-text network config. One or more tokens per line; '#' comments.
//
//   input 7 80 257        # channels frames bins
//   output accdoa         # or: scene
//   conv 64 3x3 pool 1x8  # conv + optional fused pool
//   bn
//   relu
//   bigru 128
//   linear 12 tanh        # linear + optional fused activation
//   flatten
inline NetworkSpec parse_network_config(const std::string& text, const std::string& origin) {
  NetworkSpec spec;
  bool saw_input = false, saw_output = false;
  int lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);

    std::vector<std::string> tok;
    for (const std::string& part : split(line, ' '))
      if (!trim(part).empty()) tok.push_back(trim(part));

    auto parse_pair = [&](const std::string& s, int& a, int& b) {
      const std::size_t x = s.find('x');
      if (x == std::string::npos) fail(Errc::format_error, where + ": expected AxB, got " + s);
      a = static_cast<int>(parse_ll(s.substr(0, x), where));
      b = static_cast<int>(parse_ll(s.substr(x + 1), where));
    };

    std::size_t i = 0;
    while (i < tok.size()) {
      const std::string& word = tok[i];
      if (word == "input") {
        if (i + 3 >= tok.size()) fail(Errc::format_error, where + ": input needs C T B");
        spec.in_channels = static_cast<int>(parse_ll(tok[i + 1], where));
        spec.in_frames = static_cast<int>(parse_ll(tok[i + 2], where));
        spec.in_bins = static_cast<int>(parse_ll(tok[i + 3], where));
        saw_input = true;
        i += 4;
      } else if (word == "output") {
        if (i + 1 >= tok.size()) fail(Errc::format_error, where + ": output needs a tag");
        if (tok[i + 1] == "accdoa") spec.output = OutputContract::Accdoa2D;
        else if (tok[i + 1] == "scene") spec.output = OutputContract::SceneLogits;
        else fail(Errc::format_error, where + ": unknown output tag " + tok[i + 1]);
        saw_output = true;
        i += 2;
      } else if (word == "conv") {
        if (i + 2 >= tok.size()) fail(Errc::format_error, where + ": conv needs filters and KhxKw");
        LayerSpec l;
        l.kind = LayerKind::Conv2d;
        l.out_channels = static_cast<int>(parse_ll(tok[i + 1], where));
        parse_pair(tok[i + 2], l.kh, l.kw);
        spec.layers.push_back(l);
        i += 3;
      } else if (word == "pool") {
        if (i + 1 >= tok.size()) fail(Errc::format_error, where + ": pool needs TxF");
        LayerSpec l;
        l.kind = LayerKind::MaxPool2d;
        parse_pair(tok[i + 1], l.pool_t, l.pool_f);
        spec.layers.push_back(l);
        i += 2;
      } else if (word == "gru" || word == "bigru") {
        if (i + 1 >= tok.size()) fail(Errc::format_error, where + ": " + word + " needs hidden size");
        LayerSpec l;
        l.kind = word == "gru" ? LayerKind::Gru : LayerKind::BiGru;
        l.hidden = static_cast<int>(parse_ll(tok[i + 1], where));
        spec.layers.push_back(l);
        i += 2;
      } else if (word == "linear") {
        if (i + 1 >= tok.size()) fail(Errc::format_error, where + ": linear needs output dim");
        LayerSpec l;
        l.kind = LayerKind::Linear;
        l.out_dim = static_cast<int>(parse_ll(tok[i + 1], where));
        spec.layers.push_back(l);
        i += 2;
      } else if (word == "bn") {
        spec.layers.push_back({.kind = LayerKind::BatchNorm2d});
        ++i;
      } else if (word == "relu") {
        spec.layers.push_back({.kind = LayerKind::ReLU});
        ++i;
      } else if (word == "tanh") {
        spec.layers.push_back({.kind = LayerKind::Tanh});
        ++i;
      } else if (word == "sigmoid") {
        spec.layers.push_back({.kind = LayerKind::Sigmoid});
        ++i;
      } else if (word == "flatten") {
        spec.layers.push_back({.kind = LayerKind::FlattenFreq});
        ++i;
      } else {
        fail(Errc::format_error, where + ": unknown token '" + word + "'");
      }
    }
  }
  if (!saw_input) fail(Errc::format_error, origin + ": missing 'input C T B' line");
  if (!saw_output) fail(Errc::format_error, origin + ": missing 'output accdoa|scene' line");
  spec.compose();
  return spec;
}

inline NetworkSpec load_network_config(const std::string& path) {
  return parse_network_config(read_file_text(path), path);
}

}  // namespace seldedge
