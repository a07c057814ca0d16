// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <vector>

#include "seldedge/audio.hpp"
#include "seldedge/rng.hpp"
#include "seldedge/scene.hpp"

namespace seldedge {

// Procedural mono source material. Nothing here aims for perceptual realism;
// the generators exist so corpus synthesis works out of the box with
// class-distinctive, deterministic waveforms. User WAV pools can replace
// them (see CorpusConfig::source_pool).
namespace srcgen {

inline void normalize_peak(std::vector<double>& x, double target) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0) {
    const double g = target / peak;
    for (double& v : x) v *= g;
  }
}

inline AudioClip to_clip(const std::vector<double>& x, int sr) {
  AudioClip c = AudioClip::zeros(1, static_cast<int>(x.size()), sr);
  for (std::size_t i = 0; i < x.size(); ++i) c.samples[i] = static_cast<float>(x[i]);
  return c;
}

// Damped two-partial strike, repeated: bicycle bell.
inline std::vector<double> bicycle(int n, int sr, Rng& rng) {
  std::vector<double> x(n, 0.0);
  const double f0 = rng.uniform(2000.0, 2500.0);
  const int strikes = 1 + static_cast<int>(rng.uniform_index(2));
  for (int s = 0; s < strikes; ++s) {
    const int start = static_cast<int>(rng.uniform(0.0, 0.3) * sr * s);
    for (int i = start; i < n; ++i) {
      const double t = static_cast<double>(i - start) / sr;
      const double env = std::exp(-t / 0.12);
      x[i] += env * (std::sin(2 * M_PI * f0 * t) + 0.6 * std::sin(2 * M_PI * f0 * 2.71 * t));
    }
  }
  return x;
}

// Steady dual-tone harmonic stack with slow beating: car horn.
inline std::vector<double> car_horn(int n, int sr, Rng& rng) {
  std::vector<double> x(n, 0.0);
  const double f1 = rng.uniform(400.0, 440.0);
  const double f2 = rng.uniform(480.0, 530.0);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double am = 1.0 + 0.15 * std::sin(2 * M_PI * 5.0 * t);
    double v = 0.0;
    for (int k = 1; k <= 4; ++k)
      v += (std::sin(2 * M_PI * f1 * k * t) + std::sin(2 * M_PI * f2 * k * t)) / k;
    const double headtail = std::min({1.0, 20.0 * t, 20.0 * (static_cast<double>(n) / sr - t)});
    x[i] = am * v * std::max(0.0, headtail);
  }
  return x;
}

// Pitch-gliding harmonic wail with burst envelope: crying.
inline std::vector<double> crying(int n, int sr, Rng& rng) {
  std::vector<double> x(n, 0.0);
  const double base = rng.uniform(320.0, 400.0);
  const double burst_hz = rng.uniform(1.0, 1.6);
  double phase = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double glide = base * (1.0 + 0.35 * std::sin(2 * M_PI * 0.8 * t)) *
                         (1.0 + 0.03 * std::sin(2 * M_PI * 6.0 * t));
    phase += 2 * M_PI * glide / sr;
    const double env = std::pow(0.5 * (1.0 - std::cos(2 * M_PI * burst_hz * t)), 1.5);
    double v = 0.0;
    for (int k = 1; k <= 5; ++k) v += std::sin(phase * k) / std::pow(k, 1.2);
    x[i] = env * v;
  }
  return x;
}

// Short formant-like bursts: dog barks.
inline std::vector<double> dog(int n, int sr, Rng& rng) {
  std::vector<double> x(n, 0.0);
  const int barks = 2 + static_cast<int>(rng.uniform_index(2));
  double t0 = 0.02;
  for (int b = 0; b < barks; ++b) {
    const double f = rng.uniform(550.0, 750.0);
    const double dur = rng.uniform(0.08, 0.14);
    const int start = static_cast<int>(t0 * sr);
    const int end = std::min(n, start + static_cast<int>(dur * sr));
    for (int i = start; i < end; ++i) {
      const double t = static_cast<double>(i - start) / sr;
      const double env = std::pow(t / dur, 0.3) * std::exp(-6.0 * t / dur);
      const double growl = std::sin(2 * M_PI * f * t + 1.2 * std::sin(2 * M_PI * 30.0 * t));
      x[i] += env * (growl + 0.4 * rng.normal() * std::exp(-8.0 * t / dur));
    }
    t0 += dur + rng.uniform(0.1, 0.25);
    if (t0 * sr >= n) break;
  }
  return x;
}

// Damped low thump plus click transient, a few times: door knock.
inline std::vector<double> door_knock(int n, int sr, Rng& rng) {
  std::vector<double> x(n, 0.0);
  const int knocks = 2 + static_cast<int>(rng.uniform_index(3));
  double t0 = 0.01;
  for (int k = 0; k < knocks; ++k) {
    const double f = rng.uniform(95.0, 130.0);
    const int start = static_cast<int>(t0 * sr);
    for (int i = start; i < std::min(n, start + static_cast<int>(0.12 * sr)); ++i) {
      const double t = static_cast<double>(i - start) / sr;
      x[i] += std::exp(-t / 0.03) * std::sin(2 * M_PI * f * t);
      if (t < 0.004) x[i] += 0.5 * rng.normal() * (1.0 - t / 0.004);
    }
    t0 += rng.uniform(0.15, 0.3);
    if (t0 * sr >= n) break;
  }
  return x;
}

// Slow triangular frequency sweep: siren wail.
inline std::vector<double> siren(int n, int sr, Rng& rng) {
  std::vector<double> x(n, 0.0);
  const double lo = rng.uniform(550.0, 700.0);
  const double hi = rng.uniform(1100.0, 1400.0);
  const double rate = rng.uniform(0.5, 0.9);
  double phase = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    double saw = std::fmod(rate * t, 1.0);
    const double tri = saw < 0.5 ? 2.0 * saw : 2.0 * (1.0 - saw);
    const double f = lo + (hi - lo) * tri;
    phase += 2 * M_PI * f / sr;
    x[i] = std::sin(phase) + 0.3 * std::sin(2 * phase);
  }
  return x;
}

// One-pole lowpass used to color noise beds.
inline double onepole(double& state, double x, double a) {
  state = a * state + (1.0 - a) * x;
  return state;
}

inline std::vector<double> background(SceneId scene, int n, int sr, Rng& rng) {
  std::vector<double> x(n, 0.0);
  double lp1 = 0.0, lp2 = 0.0;
  switch (scene) {
    case SceneId::Indoor: {
      // HVAC rumble + mains hum
      const double hum = rng.uniform(0.1, 0.25);
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sr;
        double v = onepole(lp1, rng.normal(), 0.995);
        v = onepole(lp2, v, 0.98);
        x[i] = 18.0 * v + hum * (std::sin(2 * M_PI * 50.0 * t) + 0.4 * std::sin(2 * M_PI * 100.0 * t));
      }
      break;
    }
    case SceneId::Nature: {
      // wind: slowly amplitude-modulated colored noise + two brief chirps
      const double gust_hz = rng.uniform(0.2, 0.45);
      const double gust_ph = rng.uniform(0.0, 2 * M_PI);
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sr;
        const double gust = 0.6 + 0.4 * std::sin(2 * M_PI * gust_hz * t + gust_ph);
        x[i] = 8.0 * gust * onepole(lp1, rng.normal(), 0.97);
      }
      for (int c = 0; c < 2; ++c) {
        const int start = static_cast<int>(rng.uniform(0.0, 0.8) * n);
        const double f = rng.uniform(2800.0, 4500.0);
        for (int i = start; i < std::min(n, start + sr / 12); ++i) {
          const double t = static_cast<double>(i - start) / sr;
          x[i] += 0.8 * std::sin(2 * M_PI * (f + 2000.0 * t) * t) * std::sin(M_PI * t * 12.0);
        }
      }
      break;
    }
    case SceneId::Urban: {
      // traffic: heavy low rumble with engine-rate modulation + hiss bed
      const double eng_hz = rng.uniform(11.0, 18.0);
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sr;
        const double mod = 1.0 + 0.3 * std::sin(2 * M_PI * eng_hz * t);
        double v = onepole(lp1, rng.normal(), 0.992);
        x[i] = 14.0 * mod * v + 0.35 * onepole(lp2, rng.normal(), 0.6);
      }
      break;
    }
  }
  return x;
}

}  // namespace srcgen

// Deterministic mono event waveform for one class.
inline AudioClip make_event(EventClassId cls, double duration_s, int sample_rate, Rng& rng) {
  const int n = std::max(1, static_cast<int>(duration_s * sample_rate));
  std::vector<double> x;
  switch (cls) {
    case EventClassId::Bicycle: x = srcgen::bicycle(n, sample_rate, rng); break;
    case EventClassId::CarHorn: x = srcgen::car_horn(n, sample_rate, rng); break;
    case EventClassId::Crying: x = srcgen::crying(n, sample_rate, rng); break;
    case EventClassId::Dog: x = srcgen::dog(n, sample_rate, rng); break;
    case EventClassId::DoorKnock: x = srcgen::door_knock(n, sample_rate, rng); break;
    case EventClassId::Siren: x = srcgen::siren(n, sample_rate, rng); break;
  }
  srcgen::normalize_peak(x, 0.7);
  return srcgen::to_clip(x, sample_rate);
}

// Deterministic mono background bed for one scene.
inline AudioClip make_background(SceneId scene, double duration_s, int sample_rate, Rng& rng) {
  const int n = std::max(1, static_cast<int>(duration_s * sample_rate));
  std::vector<double> x = srcgen::background(scene, n, sample_rate, rng);
  srcgen::normalize_peak(x, 0.35);
  return srcgen::to_clip(x, sample_rate);
}

}  // namespace seldedge
