// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <vector>

#include "seldedge/accdoa.hpp"
#include "seldedge/metrics.hpp"
#include "seldedge/scene.hpp"
#include "seldedge/synth.hpp"

namespace seldedge {

// Default search grid 0.30, 0.35, ..., 0.80.
inline std::vector<double> default_tune_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 10; ++k) g.push_back((30 + 5 * k) / 100.0);
  return g;
}

// Grid-search the threshold matrix: for each (scene, class) cell
// independently, pick the grid value maximizing that class's location-
// dependent F-score over clips of that scene. Ties go to the larger
// threshold (favors precision on classes foreign to the scene). Scenes with
// no clips fall back to the global threshold.
inline ThresholdMatrix tune_thresholds(const std::vector<AccdoaFrameSeq>& preds,
                                       const std::vector<std::vector<SpatialEventLabel>>& truths,
                                       const std::vector<SceneId>& scenes,
                                       const std::vector<double>& grid,
                                       double theta_max_deg = kThetaMaxDeg,
                                       const DecodeConfig& dc = {}) {
  if (preds.size() != truths.size() || preds.size() != scenes.size())
    fail(Errc::invalid_argument, "tune_thresholds: misaligned input lists");
  if (grid.empty()) fail(Errc::invalid_argument, "tune_thresholds: empty grid");
  for (double v : grid)
    if (v < 0.0 || v > 1.0) fail(Errc::invalid_argument, "tune_thresholds: grid value outside [0,1]");
  std::vector<double> ordered = grid;
  std::sort(ordered.begin(), ordered.end());

  ThresholdMatrix tm = ThresholdMatrix::uniform(0.5);

  for (int s = 0; s < kNumScenes; ++s) {
    std::vector<std::size_t> clip_idx;
    for (std::size_t i = 0; i < scenes.size(); ++i)
      if (static_cast<int>(scenes[i]) == s) clip_idx.push_back(i);
    if (clip_idx.empty()) {
      for (int c = 0; c < kNumClasses; ++c) tm.tau[s][c] = tm.tau_global;
      continue;
    }
    for (int cls = 0; cls < kNumClasses; ++cls) {
      double best_tau = ordered.front();
      double best_f = -1.0;
      for (double tau : ordered) {
        long long tp = 0, fp = 0, fn = 0;
        for (std::size_t i : clip_idx) {
          const std::vector<DetectionEvent> ev = decode_class(preds[i], cls, tau, dc);
          std::vector<SpatialEventLabel> cls_truths;
          for (const SpatialEventLabel& t : truths[i])
            if (static_cast<int>(t.event_class) == cls) cls_truths.push_back(t);
          const auto counts = match_clip(ev, cls_truths, theta_max_deg);
          tp += counts[cls].tp;
          fp += counts[cls].fp;
          fn += counts[cls].fn;
        }
        const double f = f_score(tp, fp, fn);
        if (f >= best_f) {  // >= so ties land on the larger tau (grid ascends)
          best_f = f;
          best_tau = tau;
        }
      }
      tm.tau[s][cls] = best_tau;
    }
  }
  return tm;
}

}  // namespace seldedge
