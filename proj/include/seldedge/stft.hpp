// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "seldedge/audio.hpp"
#include "seldedge/common.hpp"
#include "seldedge/fft.hpp"

namespace seldedge {

struct StftConfig {
  int fft_size = 512;
  int win_size = 512;
  int hop = 300;
  bool center = true;  // reflect-pad so frame k is centered at k*hop
};

// One-sided complex spectrogram, channels × frames × (fft_size/2 + 1).
struct Spectrogram {
  int channels = 0;
  int frames = 0;
  int bins = 0;
  int sample_rate = 0;
  double frame_hop_s = 0.0;
  std::vector<std::complex<double>> data;

  std::complex<double>& at(int c, int t, int b) {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + b];
  }
  std::complex<double> at(int c, int t, int b) const {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + b];
  }

  double bin_hz(int b) const { return static_cast<double>(b) * sample_rate / ((bins - 1) * 2); }
};

// Periodic Hann window.
inline std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

namespace stftdetail {

// Reflect (mirror-without-repeat) index into [0, n).
inline int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = ((i % period) + period) % period;
  return i < n ? i : period - i;
}

}  // namespace stftdetail

// Frame count contract: frames = ceil(len / hop), so a 1 s clip at 24 kHz with
// hop 300 yields exactly 80 frames. The window (win_size <= fft_size) sits
// centered in the FFT buffer.
inline Spectrogram stft(const AudioClip& clip, const StftConfig& cfg) {
  clip.check();
  if (cfg.hop <= 0 || cfg.win_size <= 0 || cfg.win_size > cfg.fft_size)
    fail(Errc::invalid_argument, "stft: bad config (need hop > 0, win_size <= fft_size)");

  const int n = clip.length;
  const int frames = (n + cfg.hop - 1) / cfg.hop;
  const int bins = cfg.fft_size / 2 + 1;
  const int pad = cfg.center ? cfg.fft_size / 2 : 0;
  const int win_off = (cfg.fft_size - cfg.win_size) / 2;

  Spectrogram spec;
  spec.channels = clip.channels;
  spec.frames = frames;
  spec.bins = bins;
  spec.sample_rate = clip.sample_rate;
  spec.frame_hop_s = static_cast<double>(cfg.hop) / clip.sample_rate;
  spec.data.resize(static_cast<std::size_t>(clip.channels) * frames * bins);

  const std::vector<double> win = hann_window(cfg.win_size);
  Fft<double> fft(cfg.fft_size);  // validates power-of-two size
  std::vector<std::complex<double>> buf(cfg.fft_size);

  for (int c = 0; c < clip.channels; ++c) {
    const float* x = clip.channel(c);
    for (int t = 0; t < frames; ++t) {
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
      const int start = t * cfg.hop - pad;
      for (int i = 0; i < cfg.win_size; ++i) {
        const int src = start + win_off + i;
        const double v = (src >= 0 && src < n)
                             ? x[src]
                             : (cfg.center ? x[stftdetail::mirror(src, n)] : 0.0);
        buf[win_off + i] = v * win[i];
      }
      fft.forward(buf);
      for (int b = 0; b < bins; ++b) spec.at(c, t, b) = buf[b];
    }
  }
  return spec;
}

}  // namespace seldedge
