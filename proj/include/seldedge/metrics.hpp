// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "seldedge/accdoa.hpp"
#include "seldedge/csv.hpp"
#include "seldedge/scene.hpp"
#include "seldedge/synth.hpp"

namespace seldedge {

inline constexpr double kThetaMaxDeg = 7.5;  // half the 15-degree source grid

// Shortest angle between two azimuths, degrees in [0, 180].
inline double angular_error_deg(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

struct ClassCounts {
  long long tp = 0, fp = 0, fn = 0;
};

// Location-dependent matching for one clip. A prediction is a true positive
// iff its class matches a truth, its azimuth error is within theta_max, and
// its span overlaps the truth span. Among several class-matching predictions,
// the overlapping one with the smallest angular error is the TP candidate;
// every other prediction of that class counts as a false positive.
inline std::array<ClassCounts, kNumClasses> match_clip(
    const std::vector<DetectionEvent>& preds, const std::vector<SpatialEventLabel>& truths,
    double theta_max_deg = kThetaMaxDeg) {
  std::array<ClassCounts, kNumClasses> counts{};

  std::array<const SpatialEventLabel*, kNumClasses> truth_of{};
  for (const SpatialEventLabel& t : truths) {
    const int c = static_cast<int>(t.event_class);
    if (truth_of[c])
      fail(Errc::data_error, "match_clip: more than one truth instance for one class");
    truth_of[c] = &t;
  }

  for (int c = 0; c < kNumClasses; ++c) {
    const SpatialEventLabel* truth = truth_of[c];
    int n_preds = 0;
    const DetectionEvent* best = nullptr;
    double best_err = 0.0;
    for (const DetectionEvent& p : preds) {
      if (static_cast<int>(p.event_class) != c) continue;
      ++n_preds;
      if (!truth) continue;
      const double overlap =
          std::min(p.offset_s, truth->offset_s) - std::max(p.onset_s, truth->onset_s);
      if (overlap <= 0.0) continue;
      const double err = angular_error_deg(p.azimuth_deg, truth->azimuth_deg);
      if (err > theta_max_deg) continue;
      if (!best || err < best_err) {
        best = &p;
        best_err = err;
      }
    }
    if (truth) {
      if (best) {
        counts[c].tp = 1;
        counts[c].fp = n_preds - 1;
      } else {
        counts[c].fn = 1;
        counts[c].fp = n_preds;
      }
    } else {
      counts[c].fp = n_preds;
    }
  }
  return counts;
}

// F = 2TP / (2TP + FP + FN); 0 when the denominator is 0.
inline double f_score(long long tp, long long fp, long long fn) {
  const long long denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

struct SceneSubReport {
  std::array<ClassCounts, kNumClasses> counts{};
  double macro_f = 0.0;
};

struct EvalReport {
  std::array<ClassCounts, kNumClasses> counts{};
  std::array<double, kNumClasses> class_f{};
  // class participates in the macro mean iff it has any truth or prediction
  std::array<bool, kNumClasses> in_macro{};
  double macro_f = 0.0;
  std::array<SceneSubReport, kNumScenes> per_scene{};
  // ASC
  long long scene_correct = 0;
  long long scene_total = 0;
  double asc_accuracy = 0.0;  // fraction; meaningful when scene_total > 0

  // `class,tp,fp,fn,f_le_7p5` rows, then a macro summary row. F x100, 2 dp.
  std::string report_csv() const {
    std::string out = "class,tp,fp,fn,f_le_7p5\n";
    for (int c = 0; c < kNumClasses; ++c) {
      out += std::string(class_name(static_cast<EventClassId>(c))) + "," +
             std::to_string(counts[c].tp) + "," + std::to_string(counts[c].fp) + "," +
             std::to_string(counts[c].fn) + "," + fmt_fixed(100.0 * class_f[c], 2) + "\n";
    }
    long long tp = 0, fp = 0, fn = 0;
    for (const ClassCounts& c : counts) {
      tp += c.tp;
      fp += c.fp;
      fn += c.fn;
    }
    out += "macro," + std::to_string(tp) + "," + std::to_string(fp) + "," + std::to_string(fn) +
           "," + fmt_fixed(100.0 * macro_f, 2) + "\n";
    return out;
  }

  std::string scene_accuracy_csv(const std::array<std::array<long long, 2>, kNumScenes>&
                                     per_scene_totals) const {
    std::string out = "scene,correct,total,accuracy_pct\n";
    for (int s = 0; s < kNumScenes; ++s) {
      const long long correct = per_scene_totals[s][0], total = per_scene_totals[s][1];
      out += std::string(scene_name(static_cast<SceneId>(s))) + "," + std::to_string(correct) +
             "," + std::to_string(total) + "," +
             fmt_fixed(total > 0 ? 100.0 * correct / total : 0.0, 2) + "\n";
    }
    out += "all," + std::to_string(scene_correct) + "," + std::to_string(scene_total) + "," +
           fmt_fixed(scene_total > 0 ? 100.0 * asc_accuracy : 0.0, 2) + "\n";
    return out;
  }
};

struct ClipPredictions {
  std::string clip_id;
  std::vector<DetectionEvent> events;
};

namespace metricsdetail {

inline double macro_of(const std::array<ClassCounts, kNumClasses>& counts,
                       std::array<double, kNumClasses>* class_f = nullptr,
                       std::array<bool, kNumClasses>* in_macro = nullptr) {
  double sum = 0.0;
  int n = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const ClassCounts& cc = counts[c];
    const double f = f_score(cc.tp, cc.fp, cc.fn);
    const bool active = cc.tp + cc.fp + cc.fn > 0;
    if (class_f) (*class_f)[c] = f;
    if (in_macro) (*in_macro)[c] = active;
    if (active) {
      sum += f;
      ++n;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

}  // namespace metricsdetail

// Aggregate matching over a corpus. Predictions may omit clips (treated as
// empty); predictions for unknown clip ids are rejected. Scene predictions
// are optional; accuracy is computed over the clips they cover.
inline EvalReport evaluate_corpus(const CorpusManifest& manifest,
                                  const std::vector<ClipPredictions>& predictions,
                                  const std::map<std::string, SceneId>& scene_predictions,
                                  double theta_max_deg = kThetaMaxDeg,
                                  std::array<std::array<long long, 2>, kNumScenes>*
                                      per_scene_scene_totals = nullptr) {
  std::map<std::string, const ClipRecord*> by_id;
  for (const ClipRecord& c : manifest.clips) by_id[c.clip_id] = &c;

  std::map<std::string, const std::vector<DetectionEvent>*> pred_of;
  for (const ClipPredictions& p : predictions) {
    if (!by_id.count(p.clip_id))
      fail(Errc::data_error, "predictions reference unknown clip id: " + p.clip_id);
    if (pred_of.count(p.clip_id))
      fail(Errc::data_error, "duplicate predictions for clip id: " + p.clip_id);
    pred_of[p.clip_id] = &p.events;
  }
  for (const auto& [clip_id, scene] : scene_predictions) {
    (void)scene;
    if (!by_id.count(clip_id))
      fail(Errc::data_error, "scene predictions reference unknown clip id: " + clip_id);
  }

  EvalReport report;
  std::array<std::array<long long, 2>, kNumScenes> scene_totals{};
  static const std::vector<DetectionEvent> kNoEvents;
  for (const ClipRecord& clip : manifest.clips) {
    auto it = pred_of.find(clip.clip_id);
    const std::vector<DetectionEvent>& preds = it == pred_of.end() ? kNoEvents : *it->second;
    const std::array<ClassCounts, kNumClasses> c = match_clip(preds, clip.events, theta_max_deg);
    const int s = static_cast<int>(clip.scene);
    for (int cls = 0; cls < kNumClasses; ++cls) {
      report.counts[cls].tp += c[cls].tp;
      report.counts[cls].fp += c[cls].fp;
      report.counts[cls].fn += c[cls].fn;
      report.per_scene[s].counts[cls].tp += c[cls].tp;
      report.per_scene[s].counts[cls].fp += c[cls].fp;
      report.per_scene[s].counts[cls].fn += c[cls].fn;
    }
    auto sit = scene_predictions.find(clip.clip_id);
    if (sit != scene_predictions.end()) {
      ++report.scene_total;
      ++scene_totals[s][1];
      if (sit->second == clip.scene) {
        ++report.scene_correct;
        ++scene_totals[s][0];
      }
    }
  }

  report.macro_f = metricsdetail::macro_of(report.counts, &report.class_f, &report.in_macro);
  for (int s = 0; s < kNumScenes; ++s)
    report.per_scene[s].macro_f = metricsdetail::macro_of(report.per_scene[s].counts);
  report.asc_accuracy =
      report.scene_total > 0
          ? static_cast<double>(report.scene_correct) / static_cast<double>(report.scene_total)
          : 0.0;
  if (per_scene_scene_totals) *per_scene_scene_totals = scene_totals;
  return report;
}

}  // namespace seldedge
