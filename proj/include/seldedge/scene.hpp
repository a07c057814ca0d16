// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <string>
#include <vector>

#include "seldedge/common.hpp"

namespace seldedge {

// Acoustic scene categories, stable integer codes.
enum class SceneId : int { Indoor = 0, Nature = 1, Urban = 2 };
inline constexpr int kNumScenes = 3;

// Sound event classes, alphabetical, stable codes 0..5.
enum class EventClassId : int {
  Bicycle = 0,
  CarHorn = 1,
  Crying = 2,
  Dog = 3,
  DoorKnock = 4,
  Siren = 5,
};
inline constexpr int kNumClasses = 6;

inline const char* scene_name(SceneId s) {
  switch (s) {
    case SceneId::Indoor: return "Indoor";
    case SceneId::Nature: return "Nature";
    case SceneId::Urban: return "Urban";
  }
  fail(Errc::invalid_argument, "bad scene code");
}

inline const char* class_name(EventClassId c) {
  switch (c) {
    case EventClassId::Bicycle: return "Bicycle";
    case EventClassId::CarHorn: return "CarHorn";
    case EventClassId::Crying: return "Crying";
    case EventClassId::Dog: return "Dog";
    case EventClassId::DoorKnock: return "DoorKnock";
    case EventClassId::Siren: return "Siren";
  }
  fail(Errc::invalid_argument, "bad event class code");
}

inline SceneId parse_scene(const std::string& s) {
  for (int i = 0; i < kNumScenes; ++i)
    if (s == scene_name(static_cast<SceneId>(i))) return static_cast<SceneId>(i);
  fail(Errc::format_error, "unknown scene name: '" + s + "'");
}

inline EventClassId parse_event_class(const std::string& s) {
  for (int i = 0; i < kNumClasses; ++i)
    if (s == class_name(static_cast<EventClassId>(i))) return static_cast<EventClassId>(i);
  fail(Errc::format_error, "unknown event class name: '" + s + "'");
}

// Which event classes may appear in each scene, and at what SNR range.
struct SceneEventPolicy {
  struct Row {
    std::vector<EventClassId> allowed;
    double snr_lo_db = 0.0;
    double snr_hi_db = 0.0;
  };
  std::array<Row, kNumScenes> rows;

  const Row& row(SceneId s) const { return rows[static_cast<int>(s)]; }

  bool permits(SceneId s, EventClassId c) const {
    for (EventClassId a : row(s).allowed)
      if (a == c) return true;
    return false;
  }

  static SceneEventPolicy standard() {
    using E = EventClassId;
    SceneEventPolicy p;
    p.rows[static_cast<int>(SceneId::Indoor)] = {{E::Crying, E::Dog, E::DoorKnock}, 5.0, 20.0};
    p.rows[static_cast<int>(SceneId::Nature)] = {{E::Bicycle, E::Dog}, 0.0, 15.0};
    p.rows[static_cast<int>(SceneId::Urban)] = {{E::Bicycle, E::CarHorn, E::Siren}, -10.0, 5.0};
    return p;
  }
};

}  // namespace seldedge
