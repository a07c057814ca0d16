// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "seldedge/accdoa.hpp"
#include "seldedge/audio.hpp"
#include "seldedge/common.hpp"
#include "seldedge/csv.hpp"
#include "seldedge/mel.hpp"
#include "seldedge/nn/forward.hpp"
#include "seldedge/rng.hpp"
#include "seldedge/salsa.hpp"
#include "seldedge/scene.hpp"

namespace seldedge {

// Bounded single-producer / single-consumer queue. push() applies
// backpressure; would_accept()+push() lets the producer test-and-push without
// racing, because only the consumer ever frees space.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

  void push(T item) {
    std::unique_lock<std::mutex> lock(mu_);
    cv_pop_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) fail(Errc::invalid_argument, "push on closed queue");
    items_.push_back(std::move(item));
    cv_push_.notify_one();
  }

  bool would_accept() const {
    std::lock_guard<std::mutex> lock(mu_);
    return !closed_ && items_.size() < capacity_;
  }

  std::optional<T> pop() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_push_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;  // closed and drained
    T item = std::move(items_.front());
    items_.pop_front();
    cv_pop_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
    cv_push_.notify_all();
    cv_pop_.notify_all();
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_push_, cv_pop_;
  std::deque<T> items_;
  std::size_t capacity_;
  bool closed_ = false;
};

// Published ASC results, indexed by chunk. Keeps the full history so the
// "latest completed result with index <= k" rule can be both applied and
// audited, and supports blocking on a specific index for the synced policy.
class SceneBoard {
 public:
  struct Entry {
    SceneId scene = SceneId::Indoor;
    double feature_ms = 0.0;
    double infer_ms = 0.0;
    bool done = false;
  };
  struct Lookup {
    bool known = false;
    SceneId scene = SceneId::Indoor;
    std::size_t index = 0;  // which chunk's ASC result was used
  };

  void record(std::size_t index, SceneId scene, double feature_ms, double infer_ms) {
    std::lock_guard<std::mutex> lock(mu_);
    if (entries_.size() <= index) entries_.resize(index + 1);
    entries_[index] = Entry{scene, feature_ms, infer_ms, true};
    cv_.notify_all();
  }

  // Non-blocking: freshest completed result at or before chunk k.
  Lookup latest_at_most(std::size_t k) const {
    std::lock_guard<std::mutex> lock(mu_);
    return lookup_locked(k);
  }

  // Blocking: the result for chunk k itself; falls back to the freshest
  // earlier result if the board closes without one (upstream failure).
  Lookup wait_for(std::size_t k) const {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return closed_ || (entries_.size() > k && entries_[k].done); });
    return lookup_locked(k);
  }

  bool get(std::size_t index, Entry* out) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (index >= entries_.size() || !entries_[index].done) return false;
    *out = entries_[index];
    return true;
  }

  void close() {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

 private:
  Lookup lookup_locked(std::size_t k) const {
    const std::size_t hi = std::min(k + 1, entries_.size());
    for (std::size_t i = hi; i-- > 0;)
      if (entries_[i].done) return Lookup{true, entries_[i].scene, i};
    return Lookup{};
  }

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<Entry> entries_;
  bool closed_ = false;
};

// Per-chunk stage latencies, milliseconds.
struct StageTimings {
  double asc_feature_ms = 0.0;
  double asc_infer_ms = 0.0;
  double seld_feature_ms = 0.0;
  double seld_infer_ms = 0.0;
  double decode_ms = 0.0;
  double end_to_end_ms = 0.0;
};

enum class ScenePolicy {
  LatestWins,  // freshest completed ASC result with index <= k; never blocks
  Synced,      // wait for the ASC result of chunk k itself; deterministic
};

struct PipelineConfig {
  int sample_rate = 24000;
  double chunk_seconds = 1.0;
  std::size_t queue_capacity = 4;
  ScenePolicy policy = ScenePolicy::LatestWins;
  bool live_drop = false;  // drop chunks jointly when a queue is full
  DecodeConfig decode;

  int chunk_samples() const {
    const double exact = chunk_seconds * sample_rate;
    const int n = static_cast<int>(std::lround(exact));
    if (std::fabs(exact - n) > 1e-9 || n <= 0)
      fail(Errc::invalid_argument, "chunk length times sample rate must be a positive integer");
    return n;
  }
};

struct StreamResult {
  std::size_t index = 0;
  bool scene_known = false;
  SceneId scene_used = SceneId::Indoor;
  std::size_t scene_source_index = 0;  // which chunk's ASC result conditioned decoding
  std::vector<DetectionEvent> events;
  StageTimings t;
};

struct RunSummary {
  std::vector<StreamResult> results;  // in input order
  std::size_t submitted = 0;
  std::size_t processed = 0;
  std::size_t dropped = 0;
};

// Pulls successive fixed-length chunks; empty optional ends the stream.
using ChunkSource = std::function<std::optional<AudioClip>()>;

// Deterministic synthetic 4-channel noise chunks (benchmark stand-in for a
// live capture device).
inline ChunkSource synthetic_chunk_source(std::size_t n, std::uint64_t seed, int sample_rate,
                                          int chunk_samples) {
  auto counter = std::make_shared<std::size_t>(0);
  return [=]() -> std::optional<AudioClip> {
    if (*counter >= n) return std::nullopt;
    Rng rng(derive_seed(seed, (*counter)++));
    AudioClip clip = AudioClip::zeros(4, chunk_samples, sample_rate);
    double lp = 0.0;
    for (int i = 0; i < chunk_samples; ++i) {
      lp = 0.97 * lp + 0.03 * rng.normal();
      const float v = static_cast<float>(8.0 * lp);
      for (int c = 0; c < 4; ++c) clip.at(c, i) = v;
    }
    return clip;
  };
}

// Three-stage runtime: an acquisition thread fans chunks out over bounded
// queues to an ASC thread (mono log-mel + scene classifier, publishing to the
// scene board) and a SELD thread (SALSA-Lite + ACCDOA net + scene-conditioned
// decoding). Results come out in input order because the SELD stage is the
// sole emitter and consumes its queue in order.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, Model seld_model, Model asc_model, ThresholdMatrix thresholds)
      : cfg_(std::move(cfg)),
        seld_(std::move(seld_model)),
        asc_(std::move(asc_model)),
        tm_(std::move(thresholds)) {
    tm_.validate();
    const int chunk = cfg_.chunk_samples();
    const int seld_frames = (chunk + 299) / 300;
    if (seld_.spec().in_channels != 7 || seld_.spec().in_frames != seld_frames ||
        seld_.spec().in_bins != 257)
      fail(Errc::invalid_argument, "SELD model input layout does not fit the chunk length");
    const int asc_frames = (chunk + 799) / 800;
    if (asc_.spec().in_channels != 1 || asc_.spec().in_frames != asc_frames)
      fail(Errc::invalid_argument, "ASC model input layout does not fit the chunk length");
    if (seld_.spec().output != OutputContract::Accdoa2D)
      fail(Errc::invalid_argument, "SELD model must have an ACCDOA head");
    if (asc_.spec().output != OutputContract::SceneLogits)
      fail(Errc::invalid_argument, "ASC model must have a scene head");
  }

  const PipelineConfig& config() const { return cfg_; }

  RunSummary run(const ChunkSource& source,
                 const std::function<void(const StreamResult&)>& on_result = {}) {
    using clock = std::chrono::steady_clock;
    struct Chunk {
      std::size_t index;
      AudioClip audio;  // 4-channel for SELD, mono channel 0 for ASC
      clock::time_point submitted;
    };
    auto ms = [](clock::time_point a, clock::time_point b) {
      return std::chrono::duration<double, std::milli>(b - a).count();
    };

    BoundedQueue<Chunk> asc_q(cfg_.queue_capacity), seld_q(cfg_.queue_capacity);
    SceneBoard board;
    RunSummary summary;
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto note_error = [&] {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!first_error) first_error = std::current_exception();
    };
    const int chunk_samples = cfg_.chunk_samples();

    std::thread asc_thread([&] {
      try {
        while (std::optional<Chunk> ch = asc_q.pop()) {
          const auto t0 = clock::now();
          const FeatureTensor mel =
              log_mel(ch->audio, asc_.spec().in_bins, 4096, 800);
          const auto t1 = clock::now();
          const NnOutput logits = asc_.forward(mel);
          const SceneId scene = static_cast<SceneId>(classify_scene(logits));
          const auto t2 = clock::now();
          board.record(ch->index, scene, ms(t0, t1), ms(t1, t2));
        }
      } catch (...) {
        note_error();
      }
      board.close();
    });

    std::thread seld_thread([&] {
      try {
        while (std::optional<Chunk> ch = seld_q.pop()) {
          const auto t0 = clock::now();
          const FeatureTensor feat = salsa_lite(ch->audio);
          const auto t1 = clock::now();
          const AccdoaFrameSeq seq = AccdoaFrameSeq::from_output(seld_.forward(feat));
          const auto t2 = clock::now();
          const SceneBoard::Lookup lk = cfg_.policy == ScenePolicy::Synced
                                            ? board.wait_for(ch->index)
                                            : board.latest_at_most(ch->index);
          const auto t3 = clock::now();
          std::optional<SceneId> scene;
          if (lk.known) scene = lk.scene;
          StreamResult r;
          r.index = ch->index;
          r.scene_known = lk.known;
          r.scene_used = lk.scene;
          r.scene_source_index = lk.index;
          r.events = decode(seq, scene, tm_, cfg_.decode);
          const auto t4 = clock::now();
          r.t.seld_feature_ms = ms(t0, t1);
          r.t.seld_infer_ms = ms(t1, t2);
          r.t.decode_ms = ms(t3, t4);
          r.t.end_to_end_ms = ms(ch->submitted, t4);
          summary.results.push_back(std::move(r));
          if (on_result) on_result(summary.results.back());
        }
      } catch (...) {
        note_error();
      }
    });

    try {
      std::size_t index = 0;
      while (std::optional<AudioClip> clip = source()) {
        clip->check();
        if (clip->channels != 4 || clip->sample_rate != cfg_.sample_rate ||
            clip->length != chunk_samples)
          fail(Errc::invalid_argument,
               "stream chunk must be 4-channel at the configured rate and length");
        Chunk seld_chunk{index, std::move(*clip), clock::now()};
        Chunk asc_chunk{index, seld_chunk.audio.mono(0), seld_chunk.submitted};
        ++summary.submitted;
        if (cfg_.live_drop) {
          // joint admission: either both stages see the chunk or neither does
          if (asc_q.would_accept() && seld_q.would_accept()) {
            asc_q.push(std::move(asc_chunk));
            seld_q.push(std::move(seld_chunk));
          } else {
            ++summary.dropped;
          }
        } else {
          asc_q.push(std::move(asc_chunk));
          seld_q.push(std::move(seld_chunk));
        }
        ++index;
      }
    } catch (...) {
      note_error();
    }
    asc_q.close();
    seld_q.close();
    asc_thread.join();
    seld_thread.join();
    if (first_error) std::rethrow_exception(first_error);

    // fold the ASC stage timings into the per-chunk records
    for (StreamResult& r : summary.results) {
      SceneBoard::Entry e;
      if (board.get(r.index, &e)) {
        r.t.asc_feature_ms = e.feature_ms;
        r.t.asc_infer_ms = e.infer_ms;
      }
    }
    summary.processed = summary.results.size();
    return summary;
  }

 private:
  PipelineConfig cfg_;
  Model seld_;
  Model asc_;
  ThresholdMatrix tm_;
};

// One machine-parseable line per chunk:
//   chunk_id,scene,events...,e2e_ms
// where events... is ';'-joined "Class@azimuth:onset-offset" entries.
inline std::string stream_line(const StreamResult& r) {
  std::string events;
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const DetectionEvent& e = r.events[i];
    if (i) events += ";";
    events += std::string(class_name(e.event_class)) + "@" + fmt_fixed(e.azimuth_deg, 1) + ":" +
              fmt_fixed(e.onset_s, 3) + "-" + fmt_fixed(e.offset_s, 3);
  }
  return std::to_string(r.index) + "," + (r.scene_known ? scene_name(r.scene_used) : "-") + "," +
         events + "," + fmt_fixed(r.t.end_to_end_ms, 2);
}

// Comparison baseline latencies for an embedded hearables target, ms.
struct ReferenceLatency {
  static constexpr double kAscFeature = 7.6;
  static constexpr double kAscInfer = 5.5;
  static constexpr double kAscTotal = 13.1;
  static constexpr double kSeldFeature = 18.5;
  static constexpr double kSeldInfer = 19.5;
  static constexpr double kSeldTotal = 38.0;
};

struct BenchmarkReport {
  struct Row {
    std::string stage;
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    double ref_ms = 0.0;
    bool has_ref = false;
  };
  std::vector<Row> rows;
  std::size_t chunks = 0;
  bool ordered = false;  // results came out in input order
  double mean_end_to_end_ms = 0.0;

  std::string csv() const {
    std::string out = "stage,mean_ms,p95_ms,reference_ms\n";
    for (const Row& r : rows)
      out += r.stage + "," + fmt_fixed(r.mean_ms, 3) + "," + fmt_fixed(r.p95_ms, 3) + "," +
             (r.has_ref ? fmt_fixed(r.ref_ms, 1) : std::string()) + "\n";
    return out;
  }
};

// Push n chunks through the pipeline and aggregate the per-stage breakdown.
inline BenchmarkReport benchmark_pipeline(Pipeline& pipeline, std::size_t n, std::uint64_t seed) {
  const PipelineConfig& cfg = pipeline.config();
  RunSummary summary = pipeline.run(
      synthetic_chunk_source(n, seed, cfg.sample_rate, cfg.chunk_samples()));

  BenchmarkReport report;
  report.chunks = summary.results.size();
  report.ordered = true;
  for (std::size_t i = 0; i < summary.results.size(); ++i)
    if (summary.results[i].index != i) report.ordered = false;

  auto stats = [&](auto getter) {
    std::vector<double> v;
    v.reserve(summary.results.size());
    for (const StreamResult& r : summary.results) v.push_back(getter(r.t));
    double mean = 0.0;
    for (double x : v) mean += x;
    if (!v.empty()) mean /= static_cast<double>(v.size());
    std::sort(v.begin(), v.end());
    const double p95 =
        v.empty() ? 0.0
                  : v[std::min(v.size() - 1,
                               static_cast<std::size_t>(std::ceil(0.95 * v.size())) - 1)];
    return std::pair<double, double>(mean, p95);
  };

  auto add = [&](const std::string& stage, auto getter, double ref, bool has_ref) {
    const auto [mean, p95] = stats(getter);
    report.rows.push_back({stage, mean, p95, ref, has_ref});
  };
  add("asc_feature", [](const StageTimings& t) { return t.asc_feature_ms; },
      ReferenceLatency::kAscFeature, true);
  add("asc_infer", [](const StageTimings& t) { return t.asc_infer_ms; },
      ReferenceLatency::kAscInfer, true);
  add("asc_total", [](const StageTimings& t) { return t.asc_feature_ms + t.asc_infer_ms; },
      ReferenceLatency::kAscTotal, true);
  add("seld_feature", [](const StageTimings& t) { return t.seld_feature_ms; },
      ReferenceLatency::kSeldFeature, true);
  add("seld_infer", [](const StageTimings& t) { return t.seld_infer_ms; },
      ReferenceLatency::kSeldInfer, true);
  add("seld_total", [](const StageTimings& t) { return t.seld_feature_ms + t.seld_infer_ms; },
      ReferenceLatency::kSeldTotal, true);
  add("decode", [](const StageTimings& t) { return t.decode_ms; }, 0.0, false);
  add("end_to_end", [](const StageTimings& t) { return t.end_to_end_ms; }, 0.0, false);
  report.mean_end_to_end_ms = report.rows.back().mean_ms;
  return report;
}

}  // namespace seldedge
