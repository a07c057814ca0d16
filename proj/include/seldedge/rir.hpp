// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "seldedge/common.hpp"
#include "seldedge/rng.hpp"
#include "seldedge/wav.hpp"

namespace seldedge {

inline constexpr int kNumAzimuths = 24;
inline constexpr int kAzimuthStepDeg = 15;
inline constexpr double kSpeedOfSound = 343.0;   // m/s
inline constexpr double kArraySpacing = 0.18;    // largest inter-mic distance, m

// One 4-channel impulse response.
struct Rir {
  int sample_rate = 0;
  std::vector<std::vector<double>> ch;  // 4 × taps
};

// 24 four-channel impulse responses on a uniform 15-degree azimuth grid.
// Either procedurally generated (fractional plane-wave delays for a square
// array inscribed in an 18 cm aperture, plus a decaying diffuse tail) or
// loaded from user-supplied WAV files.
class RirBank {
 public:
  static RirBank procedural(int sample_rate, std::uint64_t seed = 0x51D0) {
    constexpr int kTaps = 2048;
    constexpr double kBaseDelay = 16.0;       // samples, keeps all arrivals causal
    constexpr double kTailDecay = 400.0;      // samples, exponential time constant
    constexpr double kTailAmp = 0.0126;       // ~ -15 dB direct-to-diffuse energy
    constexpr double kRadius = kArraySpacing / 2.0;

    RirBank bank;
    bank.sample_rate_ = sample_rate;
    bank.irs_.resize(kNumAzimuths);
    for (int k = 0; k < kNumAzimuths; ++k) {
      const double az = k * kAzimuthStepDeg * M_PI / 180.0;
      Rir& rir = bank.irs_[k];
      rir.sample_rate = sample_rate;
      rir.ch.assign(4, std::vector<double>(kTaps, 0.0));
      for (int m = 0; m < 4; ++m) {
        // mics at 45 + 90 m degrees on a circle of radius 9 cm
        const double phi = (45.0 + 90.0 * m) * M_PI / 180.0;
        const double proj = kRadius * (std::cos(phi) * std::cos(az) + std::sin(phi) * std::sin(az));
        const double delay = kBaseDelay - proj / kSpeedOfSound * sample_rate;
        add_windowed_sinc(rir.ch[m], delay);
        Rng tail_rng(derive_seed(seed, static_cast<std::uint64_t>(k) * 4 + m));
        const int tail_start = static_cast<int>(kBaseDelay) + 20;
        for (int n = tail_start; n < kTaps; ++n)
          rir.ch[m][n] += kTailAmp * tail_rng.normal() * std::exp(-(n - tail_start) / kTailDecay);
      }
    }
    return bank;
  }

  // Loads az_000.wav .. az_345.wav (4-channel each) from a directory.
  static RirBank from_wav_dir(const std::string& dir) {
    RirBank bank;
    bank.irs_.resize(kNumAzimuths);
    for (int k = 0; k < kNumAzimuths; ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "az_%03d.wav", k * kAzimuthStepDeg);
      AudioClip clip = read_wav(dir + "/" + name);
      if (clip.channels != 4)
        fail(Errc::data_error, std::string("RIR file is not 4-channel: ") + name);
      if (k == 0)
        bank.sample_rate_ = clip.sample_rate;
      else if (clip.sample_rate != bank.sample_rate_)
        fail(Errc::data_error, std::string("RIR sample rate differs across bank: ") + name);
      Rir& rir = bank.irs_[k];
      rir.sample_rate = clip.sample_rate;
      rir.ch.assign(4, std::vector<double>(clip.length));
      for (int m = 0; m < 4; ++m)
        for (int i = 0; i < clip.length; ++i) rir.ch[m][i] = clip.at(m, i);
    }
    return bank;
  }

  int sample_rate() const { return sample_rate_; }
  int size() const { return static_cast<int>(irs_.size()); }

  const Rir& at_index(int k) const {
    if (k < 0 || k >= size()) fail(Errc::invalid_argument, "azimuth index out of range");
    return irs_[k];
  }

  const Rir& at_azimuth(int deg) const {
    deg = ((deg % 360) + 360) % 360;
    if (deg % kAzimuthStepDeg != 0)
      fail(Errc::invalid_argument, "azimuth not on the 15-degree grid: " + std::to_string(deg));
    return irs_[deg / kAzimuthStepDeg];
  }

 private:
  static void add_windowed_sinc(std::vector<double>& h, double delay) {
    constexpr int kHalf = 12;  // taps of sinc support each side
    const int lo = std::max(0, static_cast<int>(std::ceil(delay)) - kHalf);
    const int hi = std::min(static_cast<int>(h.size()) - 1,
                            static_cast<int>(std::floor(delay)) + kHalf);
    for (int n = lo; n <= hi; ++n) {
      const double x = n - delay;
      const double s = (x == 0.0) ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
      const double w = 0.5 * (1.0 + std::cos(M_PI * x / kHalf));  // Hann taper
      h[n] += s * w;
    }
  }

  int sample_rate_ = 0;
  std::vector<Rir> irs_;
};

}  // namespace seldedge
