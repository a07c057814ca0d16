// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <complex>

#include "seldedge/audio.hpp"
#include "seldedge/common.hpp"
#include "seldedge/feature_tensor.hpp"
#include "seldedge/mel.hpp"
#include "seldedge/rir.hpp"
#include "seldedge/stft.hpp"

namespace seldedge {

struct SalsaLiteConfig {
  int reference_channel = 0;
  double speed_of_sound = kSpeedOfSound;  // m/s
  double mic_spacing = kArraySpacing;     // m
  double f_alias_hz = 1000.0;             // phase treated as ambiguous above this
};

// SALSA-Lite feature stack for a 4-channel clip:
//   channels 0..3  log-power spectrograms log10(max(|X_m|^2, 1e-10))
//   channels 4..6  NIPD_m = (c / (2*pi*f)) * arg(conj(X_ref) * X_m), m != ref;
//                  zero at DC and above the aliasing frequency.
// Shape 7 × frames × (fft/2+1); 7 × 80 × 257 for a 1 s clip at 24 kHz.
inline FeatureTensor salsa_lite(const AudioClip& clip, const SalsaLiteConfig& cfg = {},
                                const StftConfig& stft_cfg = {}) {
  clip.check();
  if (clip.channels != 4) fail(Errc::invalid_argument, "salsa_lite: input must have 4 channels");
  if (cfg.reference_channel < 0 || cfg.reference_channel >= 4)
    fail(Errc::invalid_argument, "salsa_lite: bad reference channel");
  const double f_alias_nominal = cfg.speed_of_sound / (2.0 * cfg.mic_spacing);
  if (std::fabs(cfg.f_alias_hz / f_alias_nominal - 1.0) > 0.05)
    fail(Errc::invalid_argument,
         "salsa_lite: f_alias_hz inconsistent with c/(2d) beyond 5% tolerance");

  const Spectrogram spec = stft(clip, stft_cfg);
  FeatureTensor out = FeatureTensor::zeros(FeatureLayout::SeldSalsaLite, 7, spec.frames,
                                           spec.bins, spec.frame_hop_s);

  for (int m = 0; m < 4; ++m)
    for (int t = 0; t < spec.frames; ++t)
      for (int b = 0; b < spec.bins; ++b)
        out.at(m, t, b) = static_cast<float>(
            std::log10(std::max(std::norm(spec.at(m, t, b)), kLogPowerFloor)));

  int fc = 4;
  for (int m = 0; m < 4; ++m) {
    if (m == cfg.reference_channel) continue;
    for (int t = 0; t < spec.frames; ++t) {
      out.at(fc, t, 0) = 0.0f;  // DC: no phase cue
      for (int b = 1; b < spec.bins; ++b) {
        const double f = spec.bin_hz(b);
        if (f > cfg.f_alias_hz) {
          out.at(fc, t, b) = 0.0f;
          continue;
        }
        const std::complex<double> cross =
            std::conj(spec.at(cfg.reference_channel, t, b)) * spec.at(m, t, b);
        const double nipd = cfg.speed_of_sound / (2.0 * M_PI * f) * std::arg(cross);
        out.at(fc, t, b) = static_cast<float>(nipd);
      }
    }
    ++fc;
  }
  return out;
}

}  // namespace seldedge
