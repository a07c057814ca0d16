// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "seldedge/nn/spec.hpp"
#include "seldedge/nn/weights.hpp"

namespace seldedge {

// Exact trainable parameter count: the sum of element counts over the
// canonical tensor set, so it always equals the size of a validating
// WeightFile. BN contributes its folded scale + shift (2 per feature).
inline long long count_params(const NetworkSpec& spec) {
  long long n = 0;
  for (const auto& [name, dims] : expected_tensors(spec)) {
    long long e = 1;
    for (std::uint32_t d : dims) e *= d;
    n += e;
  }
  return n;
}

// Multiply-accumulate count for one input tensor (a 1 s clip by default):
//   conv    out_t * out_f * kh * kw * c_in * c_out
//   linear  in * out per frame, times frames
//   gru     3 * h * (h + in) per step, times steps (x2 for bidirectional)
// Elementwise ops, pooling, and BN count zero.
inline long long count_macs(const NetworkSpec& spec) {
  long long n = 0;
  for (const LayerSpec& l : spec.layers) {
    switch (l.kind) {
      case LayerKind::Conv2d:
        // "same" padding: output plane equals input plane
        n += static_cast<long long>(l.in_t) * l.in_f * l.kh * l.kw * l.in_c * l.out_channels;
        break;
      case LayerKind::Linear:
        n += static_cast<long long>(l.in_dim) * l.out_dim * l.steps;
        break;
      case LayerKind::Gru:
        n += 3LL * l.hidden * (l.hidden + l.in_dim) * l.steps;
        break;
      case LayerKind::BiGru:
        n += 2LL * 3LL * l.hidden * (l.hidden + l.in_dim) * l.steps;
        break;
      default:
        break;
    }
  }
  return n;
}

}  // namespace seldedge
