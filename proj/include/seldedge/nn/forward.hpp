// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "seldedge/common.hpp"
#include "seldedge/feature_tensor.hpp"
#include "seldedge/nn/spec.hpp"
#include "seldedge/nn/weights.hpp"

namespace seldedge {

// frames × dim network output.
struct NnOutput {
  int frames = 0;
  int dim = 0;
  double frame_hop_s = 0.0;
  std::vector<float> data;

  float& at(int t, int i) { return data[static_cast<std::size_t>(t) * dim + i]; }
  float at(int t, int i) const { return data[static_cast<std::size_t>(t) * dim + i]; }
};

// Immutable forward-pass engine. Weights are validated once at construction;
// forward() is pure and safe to call from several threads at once.
class Model {
 public:
  Model(NetworkSpec spec, WeightFile weights)
      : spec_(std::move(spec)), weights_(std::move(weights)) {
    spec_.compose();
    validate_weights(spec_, weights_);
  }

  const NetworkSpec& spec() const { return spec_; }

  NnOutput forward(const FeatureTensor& input) const {
    if (input.channels != spec_.in_channels || input.frames != spec_.in_frames ||
        input.bins != spec_.in_bins)
      fail(Errc::invalid_argument, "forward: input tensor does not match the network layout");
    input.check_finite();

    // spatial pipeline
    std::vector<float> cur = input.data;
    int c = spec_.in_channels, t = spec_.in_frames, f = spec_.in_bins;
    bool spatial = true;
    std::vector<float> seq;  // steps × dim once flattened
    int dim = 0, steps = 0;

    for (std::size_t li = 0; li < spec_.layers.size(); ++li) {
      const LayerSpec& l = spec_.layers[li];
      const std::string p = "l" + std::to_string(li);
      switch (l.kind) {
        case LayerKind::Conv2d: {
          cur = conv2d(cur, l, p);
          c = l.out_channels;
          break;
        }
        case LayerKind::BatchNorm2d: {
          const float* scale = tensor(p + ".scale");
          const float* shift = tensor(p + ".shift");
          const std::size_t plane = static_cast<std::size_t>(t) * f;
          for (int ch = 0; ch < c; ++ch) {
            float* x = cur.data() + ch * plane;
            for (std::size_t i = 0; i < plane; ++i) x[i] = scale[ch] * x[i] + shift[ch];
          }
          break;
        }
        case LayerKind::MaxPool2d: {
          const int ot = t / l.pool_t, of = f / l.pool_f;
          std::vector<float> out(static_cast<std::size_t>(c) * ot * of);
          for (int ch = 0; ch < c; ++ch)
            for (int y = 0; y < ot; ++y)
              for (int x = 0; x < of; ++x) {
                float m = -std::numeric_limits<float>::infinity();
                for (int dy = 0; dy < l.pool_t; ++dy) {
                  const float* row =
                      cur.data() + (static_cast<std::size_t>(ch) * t + y * l.pool_t + dy) * f;
                  for (int dx = 0; dx < l.pool_f; ++dx)
                    m = std::max(m, row[x * l.pool_f + dx]);
                }
                out[(static_cast<std::size_t>(ch) * ot + y) * of + x] = m;
              }
          cur = std::move(out);
          t = ot;
          f = of;
          break;
        }
        case LayerKind::FlattenFreq: {
          steps = t;
          dim = c * f;
          seq.resize(static_cast<std::size_t>(steps) * dim);
          for (int y = 0; y < t; ++y)
            for (int ch = 0; ch < c; ++ch)
              for (int x = 0; x < f; ++x)
                seq[static_cast<std::size_t>(y) * dim + ch * f + x] =
                    cur[(static_cast<std::size_t>(ch) * t + y) * f + x];
          spatial = false;
          break;
        }
        case LayerKind::Gru:
        case LayerKind::BiGru: {
          const bool bidir = l.kind == LayerKind::BiGru;
          const int h = l.hidden;
          std::vector<float> out(static_cast<std::size_t>(steps) * (bidir ? 2 * h : h));
          run_gru(seq, steps, dim, l, p, false, out.data(), bidir ? 2 * h : h, 0);
          if (bidir) run_gru(seq, steps, dim, l, p, true, out.data(), 2 * h, h);
          seq = std::move(out);
          dim = bidir ? 2 * h : h;
          break;
        }
        case LayerKind::Linear: {
          const float* w = tensor(p + ".weight");
          const float* b = l.bias ? tensor(p + ".bias") : nullptr;
          std::vector<float> out(static_cast<std::size_t>(steps) * l.out_dim);
          for (int y = 0; y < steps; ++y) {
            const float* x = seq.data() + static_cast<std::size_t>(y) * dim;
            for (int j = 0; j < l.out_dim; ++j) {
              const float* wr = w + static_cast<std::size_t>(j) * dim;
              double acc = b ? b[j] : 0.0;
              for (int i = 0; i < dim; ++i) acc += static_cast<double>(wr[i]) * x[i];
              out[static_cast<std::size_t>(y) * l.out_dim + j] = static_cast<float>(acc);
            }
          }
          seq = std::move(out);
          dim = l.out_dim;
          break;
        }
        case LayerKind::ReLU: {
          std::vector<float>& buf = spatial ? cur : seq;
          for (float& v : buf) v = std::max(v, 0.0f);
          break;
        }
        case LayerKind::Tanh: {
          std::vector<float>& buf = spatial ? cur : seq;
          for (float& v : buf) v = std::tanh(v);
          break;
        }
        case LayerKind::Sigmoid: {
          std::vector<float>& buf = spatial ? cur : seq;
          for (float& v : buf) v = 1.0f / (1.0f + std::exp(-v));
          break;
        }
      }
    }

    NnOutput out;
    out.frames = steps;
    out.dim = dim;
    out.frame_hop_s = input.frame_hop_s * spec_.time_stride;
    out.data = std::move(seq);
    return out;
  }

 private:
  const float* tensor(const std::string& name) const {
    const Tensor* t = weights_.find(name);
    if (!t) fail(Errc::data_error, "missing tensor at forward time: " + name);
    return t->data.data();
  }

  // Zero-padded "same" cross-correlation; plane-at-a-time accumulation keeps
  // the inner loop over frequency contiguous for vectorization.
  std::vector<float> conv2d(const std::vector<float>& in, const LayerSpec& l,
                            const std::string& p) const {
    const int c_in = l.in_c, T = l.in_t, F = l.in_f;
    const int ph = (l.kh - 1) / 2, pw = (l.kw - 1) / 2;
    const int pt = T + 2 * ph, pf = F + 2 * pw;

    std::vector<float> padded(static_cast<std::size_t>(c_in) * pt * pf, 0.0f);
    for (int ch = 0; ch < c_in; ++ch)
      for (int y = 0; y < T; ++y)
        std::copy_n(in.data() + (static_cast<std::size_t>(ch) * T + y) * F, F,
                    padded.data() + (static_cast<std::size_t>(ch) * pt + y + ph) * pf + pw);

    const float* w = tensor(p + ".weight");
    const float* b = l.bias ? tensor(p + ".bias") : nullptr;
    std::vector<float> out(static_cast<std::size_t>(l.out_channels) * T * F);
    const std::size_t plane = static_cast<std::size_t>(T) * F;
    for (int oc = 0; oc < l.out_channels; ++oc) {
      float* op = out.data() + oc * plane;
      std::fill_n(op, plane, b ? b[oc] : 0.0f);
      for (int ic = 0; ic < c_in; ++ic) {
        const float* ip = padded.data() + static_cast<std::size_t>(ic) * pt * pf;
        const float* wk = w + ((static_cast<std::size_t>(oc) * c_in + ic) * l.kh) * l.kw;
        for (int dy = 0; dy < l.kh; ++dy) {
          for (int dx = 0; dx < l.kw; ++dx) {
            const float wv = wk[dy * l.kw + dx];
            if (wv == 0.0f) continue;
            for (int y = 0; y < T; ++y) {
              const float* src = ip + (static_cast<std::size_t>(y) + dy) * pf + dx;
              float* dst = op + static_cast<std::size_t>(y) * F;
              for (int x = 0; x < F; ++x) dst[x] += wv * src[x];
            }
          }
        }
      }
    }
    return out;
  }

  // Standard gated recurrence, gate order r, z, n:
  //   r = sigmoid(Wi_r x + bi_r + Wh_r h + bh_r)
  //   z = sigmoid(Wi_z x + bi_z + Wh_z h + bh_z)
  //   n = tanh(Wi_n x + bi_n + r * (Wh_n h + bh_n))
  //   h = (1 - z) * n + z * h
  void run_gru(const std::vector<float>& seq, int steps, int in_dim, const LayerSpec& l,
               const std::string& p, bool reverse, float* out, int out_stride,
               int out_offset) const {
    const std::string sfx = reverse ? ".rev" : "";
    const float* w_ih = tensor(p + ".w_ih" + sfx);
    const float* w_hh = tensor(p + ".w_hh" + sfx);
    const float* b_ih = l.bias ? tensor(p + ".b_ih" + sfx) : nullptr;
    const float* b_hh = l.bias ? tensor(p + ".b_hh" + sfx) : nullptr;
    const int h = l.hidden;

    std::vector<float> hidden(h, 0.0f);
    std::vector<double> gi(3 * h), gh(3 * h);
    for (int k = 0; k < steps; ++k) {
      const int tt = reverse ? steps - 1 - k : k;
      const float* x = seq.data() + static_cast<std::size_t>(tt) * in_dim;
      for (int j = 0; j < 3 * h; ++j) {
        const float* wr = w_ih + static_cast<std::size_t>(j) * in_dim;
        double acc = b_ih ? b_ih[j] : 0.0;
        for (int i = 0; i < in_dim; ++i) acc += static_cast<double>(wr[i]) * x[i];
        gi[j] = acc;
      }
      for (int j = 0; j < 3 * h; ++j) {
        const float* wr = w_hh + static_cast<std::size_t>(j) * h;
        double acc = b_hh ? b_hh[j] : 0.0;
        for (int i = 0; i < h; ++i) acc += static_cast<double>(wr[i]) * hidden[i];
        gh[j] = acc;
      }
      float* dst = out + static_cast<std::size_t>(tt) * out_stride + out_offset;
      for (int i = 0; i < h; ++i) {
        const double r = 1.0 / (1.0 + std::exp(-(gi[i] + gh[i])));
        const double z = 1.0 / (1.0 + std::exp(-(gi[h + i] + gh[h + i])));
        const double n = std::tanh(gi[2 * h + i] + r * gh[2 * h + i]);
        hidden[i] = static_cast<float>((1.0 - z) * n + z * hidden[i]);
        dst[i] = hidden[i];
      }
    }
  }

  NetworkSpec spec_;
  WeightFile weights_;
};

// Scene decision from per-frame logits: argmax of the temporal mean
// (ties resolved toward the lowest scene code).
inline int classify_scene(const NnOutput& logits) {
  if (logits.dim < 1 || logits.frames < 1)
    fail(Errc::invalid_argument, "classify_scene: empty logits");
  int best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < logits.dim; ++i) {
    double acc = 0.0;
    for (int t = 0; t < logits.frames; ++t) acc += logits.at(t, i);
    const double mean = acc / logits.frames;
    if (mean > best_mean) {
      best_mean = mean;
      best = i;
    }
  }
  return best;
}

}  // namespace seldedge
