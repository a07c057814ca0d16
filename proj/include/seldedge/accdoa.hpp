// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "seldedge/common.hpp"
#include "seldedge/csv.hpp"
#include "seldedge/nn/forward.hpp"
#include "seldedge/scene.hpp"

namespace seldedge {

// Per-frame class activity vectors: frames × C × 2. The network head emits
// [x_1..x_C, y_1..y_C] per frame; each class's vector direction encodes
// azimuth and its norm encodes activity.
struct AccdoaFrameSeq {
  int frames = 0;
  double frame_hop_s = 0.0;
  std::vector<float> data;  // frames × C × 2, layout [t][class][x,y]

  static AccdoaFrameSeq zeros(int frames, double frame_hop_s) {
    AccdoaFrameSeq s;
    s.frames = frames;
    s.frame_hop_s = frame_hop_s;
    s.data.assign(static_cast<std::size_t>(frames) * kNumClasses * 2, 0.0f);
    return s;
  }

  float& x(int t, int cls) { return data[(static_cast<std::size_t>(t) * kNumClasses + cls) * 2]; }
  float& y(int t, int cls) {
    return data[(static_cast<std::size_t>(t) * kNumClasses + cls) * 2 + 1];
  }
  float x(int t, int cls) const {
    return data[(static_cast<std::size_t>(t) * kNumClasses + cls) * 2];
  }
  float y(int t, int cls) const {
    return data[(static_cast<std::size_t>(t) * kNumClasses + cls) * 2 + 1];
  }

  static AccdoaFrameSeq from_output(const NnOutput& out) {
    if (out.dim != 2 * kNumClasses)
      fail(Errc::invalid_argument, "ACCDOA output must have 2C values per frame");
    AccdoaFrameSeq s = zeros(out.frames, out.frame_hop_s);
    for (int t = 0; t < out.frames; ++t)
      for (int c = 0; c < kNumClasses; ++c) {
        s.x(t, c) = out.at(t, c);
        s.y(t, c) = out.at(t, kNumClasses + c);
      }
    return s;
  }
};

// Activity is the vector norm, clamped to 1: two tanh components can exceed
// unit norm jointly while activity is defined on [0, 1].
inline double activity(double x, double y) { return std::min(1.0, std::hypot(x, y)); }

// Direction in degrees, [0, 360); 0 = +x axis, counterclockwise.
inline double azimuth_of(double x, double y) {
  if (x == 0.0 && y == 0.0)
    fail(Errc::invalid_argument, "azimuth undefined for a zero activity vector");
  double deg = std::atan2(y, x) * 180.0 / M_PI;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

// Scene × class activity thresholds with a global fallback.
struct ThresholdMatrix {
  std::array<std::array<double, kNumClasses>, kNumScenes> tau;
  double tau_global = 0.5;

  static ThresholdMatrix uniform(double v = 0.5) {
    ThresholdMatrix m;
    for (auto& row : m.tau) row.fill(v);
    return m;
  }

  double at(SceneId s, int cls) const { return tau[static_cast<int>(s)][cls]; }

  void validate() const {
    auto ok = [](double v) { return v >= 0.0 && v <= 1.0 && std::isfinite(v); };
    if (!ok(tau_global)) fail(Errc::data_error, "tau_global outside [0,1]");
    for (const auto& row : tau)
      for (double v : row)
        if (!ok(v)) fail(Errc::data_error, "threshold outside [0,1]");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (int s = 0; s < kNumScenes; ++s) j["scenes"].push_back(scene_name(static_cast<SceneId>(s)));
    for (int c = 0; c < kNumClasses; ++c)
      j["classes"].push_back(class_name(static_cast<EventClassId>(c)));
    j["tau"] = tau;
    j["tau_global"] = tau_global;
    return j;
  }

  static ThresholdMatrix from_json(const nlohmann::json& j) {
    ThresholdMatrix m;
    const auto& scenes = j.at("scenes");
    const auto& classes = j.at("classes");
    if (scenes.size() != kNumScenes || classes.size() != kNumClasses)
      fail(Errc::format_error, "threshold file has wrong scene/class axes");
    for (int s = 0; s < kNumScenes; ++s)
      if (scenes[s] != scene_name(static_cast<SceneId>(s)))
        fail(Errc::format_error, "threshold file scene order mismatch");
    for (int c = 0; c < kNumClasses; ++c)
      if (classes[c] != class_name(static_cast<EventClassId>(c)))
        fail(Errc::format_error, "threshold file class order mismatch");
    const auto& t = j.at("tau");
    if (t.size() != kNumScenes) fail(Errc::format_error, "tau must have one row per scene");
    for (int s = 0; s < kNumScenes; ++s) {
      if (t[s].size() != kNumClasses) fail(Errc::format_error, "tau row has wrong class count");
      for (int c = 0; c < kNumClasses; ++c) m.tau[s][c] = t[s][c].get<double>();
    }
    m.tau_global = j.at("tau_global").get<double>();
    m.validate();
    return m;
  }

  void save(const std::string& path) const { write_text_file(path, to_json().dump(2) + "\n"); }

  static ThresholdMatrix load(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr,
                                             /*allow_exceptions=*/false);
    if (j.is_discarded()) fail(Errc::format_error, "invalid JSON: " + path);
    return from_json(j);
  }
};

struct DetectionEvent {
  EventClassId event_class = EventClassId::Bicycle;
  double azimuth_deg = 0.0;  // [0, 360)
  double onset_s = 0.0;
  double offset_s = 0.0;
  double mean_activity = 0.0;
};

struct DecodeConfig {
  int gap_frames = 0;  // inactive frames tolerated inside one event
  int min_frames = 1;  // shortest run kept
};

// Decode one class at a fixed threshold: strictly-above frames form runs,
// runs become events. Event azimuth is the activity-weighted circular mean.
inline std::vector<DetectionEvent> decode_class(const AccdoaFrameSeq& seq, int cls, double tau,
                                                const DecodeConfig& cfg = {}) {
  std::vector<DetectionEvent> events;
  int run_start = -1, last_active = -1;
  double sx = 0.0, sy = 0.0, sr = 0.0;
  int n_active = 0;
  double peak_r = -1.0, peak_az = 0.0;

  auto flush = [&](int end_frame) {
    if (run_start < 0) return;
    if (n_active >= cfg.min_frames) {
      DetectionEvent e;
      e.event_class = static_cast<EventClassId>(cls);
      e.onset_s = run_start * seq.frame_hop_s;
      e.offset_s = (end_frame + 1) * seq.frame_hop_s;
      e.mean_activity = sr / n_active;
      // degenerate cancellation falls back to the strongest frame
      e.azimuth_deg = (sx == 0.0 && sy == 0.0) ? peak_az : azimuth_of(sx, sy);
      events.push_back(e);
    }
    run_start = -1;
    last_active = -1;
    sx = sy = sr = 0.0;
    n_active = 0;
    peak_r = -1.0;
  };

  for (int t = 0; t < seq.frames; ++t) {
    const double x = seq.x(t, cls), y = seq.y(t, cls);
    const double r = activity(x, y);
    if (r > tau) {
      if (run_start < 0) run_start = t;
      // r > tau >= 0 implies a nonzero vector; scale to unit direction times
      // the clamped activity so each frame contributes weight r
      const double w = r / std::hypot(x, y);
      sx += w * x;
      sy += w * y;
      sr += r;
      ++n_active;
      if (r > peak_r) {
        peak_r = r;
        peak_az = azimuth_of(x, y);
      }
      last_active = t;
    } else if (run_start >= 0 && t - last_active > cfg.gap_frames) {
      flush(last_active);
    }
  }
  flush(last_active);
  return events;
}

// Decode every class, choosing per-class thresholds from the matrix when a
// scene is known and the global fallback otherwise.
inline std::vector<DetectionEvent> decode(const AccdoaFrameSeq& seq, std::optional<SceneId> scene,
                                          const ThresholdMatrix& tm, const DecodeConfig& cfg = {}) {
  std::vector<DetectionEvent> events;
  for (int cls = 0; cls < kNumClasses; ++cls) {
    const double tau = scene.has_value() ? tm.at(*scene, cls) : tm.tau_global;
    std::vector<DetectionEvent> e = decode_class(seq, cls, tau, cfg);
    events.insert(events.end(), e.begin(), e.end());
  }
  return events;
}

}  // namespace seldedge
