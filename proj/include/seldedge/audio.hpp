// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "seldedge/common.hpp"

namespace seldedge {

// Multi-channel PCM buffer, channel-major float storage.
struct AudioClip {
  int sample_rate = 0;
  int channels = 0;
  int length = 0;  // samples per channel
  std::vector<float> samples;

  static AudioClip zeros(int channels, int length, int sample_rate) {
    AudioClip c;
    c.sample_rate = sample_rate;
    c.channels = channels;
    c.length = length;
    c.samples.assign(static_cast<std::size_t>(channels) * length, 0.0f);
    return c;
  }

  float* channel(int c) { return samples.data() + static_cast<std::size_t>(c) * length; }
  const float* channel(int c) const {
    return samples.data() + static_cast<std::size_t>(c) * length;
  }
  float& at(int c, int i) { return samples[static_cast<std::size_t>(c) * length + i]; }
  float at(int c, int i) const { return samples[static_cast<std::size_t>(c) * length + i]; }

  bool empty() const { return channels == 0 || length == 0; }

  void check() const {
    if (sample_rate <= 0) fail(Errc::invalid_argument, "clip sample_rate must be positive");
    if (channels <= 0 || length < 0) fail(Errc::invalid_argument, "clip has empty shape");
    if (samples.size() != static_cast<std::size_t>(channels) * length)
      fail(Errc::invalid_argument, "clip sample buffer does not match its shape");
  }

  AudioClip mono(int c = 0) const {
    if (c < 0 || c >= channels) fail(Errc::invalid_argument, "channel index out of range");
    AudioClip out = zeros(1, length, sample_rate);
    std::memcpy(out.samples.data(), channel(c), sizeof(float) * static_cast<std::size_t>(length));
    return out;
  }

  // Replicate a mono clip across n channels (diffuse-field stand-in for
  // backgrounds recorded in mono).
  AudioClip replicated(int n_channels) const {
    if (channels != 1) fail(Errc::invalid_argument, "replicated() requires a mono clip");
    AudioClip out = zeros(n_channels, length, sample_rate);
    for (int c = 0; c < n_channels; ++c)
      std::memcpy(out.channel(c), channel(0), sizeof(float) * static_cast<std::size_t>(length));
    return out;
  }

  AudioClip slice(int start, int count) const {
    if (start < 0 || count < 0 || start + count > length)
      fail(Errc::invalid_argument, "slice out of range");
    AudioClip out = zeros(channels, count, sample_rate);
    for (int c = 0; c < channels; ++c)
      std::memcpy(out.channel(c), channel(c) + start, sizeof(float) * static_cast<std::size_t>(count));
    return out;
  }
};

inline double rms(const float* x, int n) {
  if (n <= 0) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += static_cast<double>(x[i]) * x[i];
  return std::sqrt(acc / n);
}

// RMS pooled over every channel on [start, end).
inline double rms_all_channels(const AudioClip& clip, int start, int end) {
  if (start < 0 || end > clip.length || start >= end) return 0.0;
  double acc = 0.0;
  for (int c = 0; c < clip.channels; ++c) {
    const float* x = clip.channel(c) + start;
    for (int i = 0; i < end - start; ++i) acc += static_cast<double>(x[i]) * x[i];
  }
  return std::sqrt(acc / (static_cast<double>(clip.channels) * (end - start)));
}

inline float peak_abs(const AudioClip& clip) {
  float peak = 0.0f;
  for (float v : clip.samples) peak = std::max(peak, std::fabs(v));
  return peak;
}

inline void scale(AudioClip& clip, float g) {
  for (float& v : clip.samples) v *= g;
}

}  // namespace seldedge
