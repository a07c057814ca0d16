// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "seldedge/nn/spec.hpp"
#include "seldedge/nn/weights.hpp"
#include "seldedge/scene.hpp"

namespace seldedge {

// Scripted models for tests and demos: real (NetworkSpec, WeightFile) pairs
// whose single linear layer is crafted so the forward pass computes a known
// closed-form function of the input. No training involved.
//
//   Silent         all-zero ACCDOA output
//   ConstantAccdoa one fixed vector per class on every frame
//   EnergyGate     target class fires (on the +y axis, azimuth 90) on frames
//                  whose reference log-power band rises above the silence
//                  floor; exact zero on silent frames
//   NipdKeyed      target class activity keyed to the sign of the first
//                  inter-channel phase-difference feature channel
//   ConstantScene  fixed scene logits (ASC)
enum class StubBehavior { Silent, ConstantAccdoa, EnergyGate, NipdKeyed, ConstantScene };

struct StubScript {
  StubBehavior behavior = StubBehavior::Silent;
  // ConstantAccdoa / EnergyGate / NipdKeyed
  EventClassId target_class = EventClassId::CarHorn;
  double r = 0.9;             // ConstantAccdoa activity
  double azimuth_deg = 90.0;  // ConstantAccdoa direction
  double gain = 1.0;          // EnergyGate / NipdKeyed drive strength
  // ConstantScene
  SceneId scene = SceneId::Urban;
  // input layouts
  int seld_frames = 80, seld_bins = 257;
  int asc_frames = 30, asc_bins = 256;
};

namespace stubdetail {

inline float safe_atanh(double v) {
  if (std::fabs(v) < 1e-12) return 0.0f;  // keep exact zeros exact
  v = std::clamp(v, -0.999999, 0.999999);
  return static_cast<float>(std::atanh(v));
}

}  // namespace stubdetail

inline std::pair<NetworkSpec, WeightFile> stub_model(const StubScript& script) {
  NetworkSpec spec;
  const bool is_asc = script.behavior == StubBehavior::ConstantScene;
  spec.in_channels = is_asc ? 1 : 7;
  spec.in_frames = is_asc ? script.asc_frames : script.seld_frames;
  spec.in_bins = is_asc ? script.asc_bins : script.seld_bins;
  spec.output = is_asc ? OutputContract::SceneLogits : OutputContract::Accdoa2D;

  spec.layers.push_back({.kind = LayerKind::FlattenFreq});
  LayerSpec lin;
  lin.kind = LayerKind::Linear;
  lin.out_dim = is_asc ? kNumScenes : 2 * kNumClasses;
  spec.layers.push_back(lin);
  if (!is_asc) spec.layers.push_back({.kind = LayerKind::Tanh});
  spec.compose();

  WeightFile wf = zero_weights(spec);
  Tensor* weight = nullptr;
  Tensor* bias = nullptr;
  for (Tensor& t : wf.tensors) {
    if (t.name == "l1.weight") weight = &t;
    if (t.name == "l1.bias") bias = &t;
  }
  const int in_dim = spec.layers[1].in_dim;
  const int bins = spec.in_bins;
  const int cls = static_cast<int>(script.target_class);

  switch (script.behavior) {
    case StubBehavior::Silent:
      break;  // zero weights, zero bias: tanh(0) = 0 everywhere
    case StubBehavior::ConstantAccdoa: {
      const double rad = script.azimuth_deg * M_PI / 180.0;
      bias->data[cls] = stubdetail::safe_atanh(script.r * std::cos(rad));
      bias->data[kNumClasses + cls] = stubdetail::safe_atanh(script.r * std::sin(rad));
      break;
    }
    case StubBehavior::EnergyGate: {
      // y_cls pre-activation = gain * (mean log-power of channel 0 + 10):
      // exactly 0 on floored (silent) frames, strongly positive otherwise.
      const int b_lo = 1, b_hi = bins;  // skip DC
      const double w = script.gain / (b_hi - b_lo);
      float* row = weight->data.data() + static_cast<std::size_t>(kNumClasses + cls) * in_dim;
      for (int b = b_lo; b < b_hi; ++b) row[b] = static_cast<float>(w);  // channel 0 block
      bias->data[kNumClasses + cls] = static_cast<float>(10.0 * script.gain);
      break;
    }
    case StubBehavior::NipdKeyed: {
      // y_cls follows the sign of NIPD channel 4 (mic 1 vs reference) summed
      // over the unaliased low band; swapping the input channels flips it.
      const int b_lo = 2, b_hi = 22;  // 50 Hz < f <= 1 kHz at 512/24 kHz
      const double w = script.gain;
      float* row = weight->data.data() + static_cast<std::size_t>(kNumClasses + cls) * in_dim;
      for (int b = b_lo; b < b_hi; ++b) row[4 * bins + b] = static_cast<float>(w);
      break;
    }
    case StubBehavior::ConstantScene: {
      bias->data[static_cast<int>(script.scene)] = 1.0f;
      break;
    }
  }
  return {std::move(spec), std::move(wf)};
}

}  // namespace seldedge
