// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <vector>

#include "seldedge/audio.hpp"
#include "seldedge/common.hpp"
#include "seldedge/feature_tensor.hpp"
#include "seldedge/stft.hpp"

namespace seldedge {

inline constexpr double kLogPowerFloor = 1e-10;

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular mel filterbank on the HTK scale, 0 Hz .. Nyquist. Each row is
// normalized to unit coefficient sum, so a filtered value is a weighted mean
// of bin powers (silence maps exactly to the log floor).
class MelFilterbank {
 public:
  MelFilterbank(int n_mels, int n_bins, double sample_rate) : n_mels_(n_mels) {
    if (n_mels < 1 || n_bins < 2) fail(Errc::invalid_argument, "mel filterbank: bad dims");
    const double nyquist = sample_rate / 2.0;
    const double bin_hz = nyquist / (n_bins - 1);
    std::vector<double> edges(n_mels + 2);
    const double mel_hi = hz_to_mel(nyquist);
    for (int i = 0; i < n_mels + 2; ++i) edges[i] = mel_to_hz(mel_hi * i / (n_mels + 1));
    centers_.assign(edges.begin() + 1, edges.end() - 1);

    rows_.resize(n_mels);
    for (int i = 0; i < n_mels; ++i) {
      const double lo = edges[i], mid = edges[i + 1], hi = edges[i + 2];
      Row& row = rows_[i];
      row.start = -1;
      double sum = 0.0;
      for (int b = 0; b < n_bins; ++b) {
        const double f = b * bin_hz;
        const double w = std::min((f - lo) / (mid - lo), (hi - f) / (hi - mid));
        if (w <= 0.0) {
          if (row.start >= 0) break;  // past the triangle
          continue;
        }
        if (row.start < 0) row.start = b;
        row.w.push_back(w);
        sum += w;
      }
      if (row.start < 0) {  // triangle narrower than one bin: take nearest
        row.start = static_cast<int>(std::min<double>(n_bins - 1.0, std::round(mid / bin_hz)));
        row.w.push_back(1.0);
        sum = 1.0;
      }
      for (double& w : row.w) w /= sum;
    }
  }

  int n_mels() const { return n_mels_; }
  double center_hz(int i) const { return centers_[i]; }

  void apply(const double* power, double* mel_out) const {
    for (int i = 0; i < n_mels_; ++i) {
      const Row& row = rows_[i];
      double acc = 0.0;
      for (std::size_t j = 0; j < row.w.size(); ++j) acc += row.w[j] * power[row.start + j];
      mel_out[i] = acc;
    }
  }

 private:
  struct Row {
    int start = 0;
    std::vector<double> w;
  };
  int n_mels_;
  std::vector<Row> rows_;
  std::vector<double> centers_;
};

// Log-power mel spectrogram of a mono clip (ASC front end):
// log10(max(mel_power, 1e-10)), shape 1 × frames × n_mels.
inline FeatureTensor log_mel(const AudioClip& clip, int n_mels = 256, int win = 4096,
                             int hop = 800) {
  clip.check();
  if (clip.channels != 1) fail(Errc::invalid_argument, "log_mel: input must be mono");

  StftConfig cfg;
  cfg.fft_size = win;
  cfg.win_size = win;
  cfg.hop = hop;
  const Spectrogram spec = stft(clip, cfg);
  const MelFilterbank bank(n_mels, spec.bins, clip.sample_rate);

  FeatureTensor out = FeatureTensor::zeros(FeatureLayout::AscLogMel, 1, spec.frames, n_mels,
                                           spec.frame_hop_s);
  std::vector<double> power(spec.bins), mel(n_mels);
  for (int t = 0; t < spec.frames; ++t) {
    for (int b = 0; b < spec.bins; ++b) power[b] = std::norm(spec.at(0, t, b));
    bank.apply(power.data(), mel.data());
    for (int i = 0; i < n_mels; ++i)
      out.at(0, t, i) = static_cast<float>(std::log10(std::max(mel[i], kLogPowerFloor)));
  }
  return out;
}

}  // namespace seldedge
