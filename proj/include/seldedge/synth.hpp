// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "seldedge/audio.hpp"
#include "seldedge/csv.hpp"
#include "seldedge/fft.hpp"
#include "seldedge/rir.hpp"
#include "seldedge/rng.hpp"
#include "seldedge/scene.hpp"
#include "seldedge/sources.hpp"
#include "seldedge/wav.hpp"

namespace seldedge {

inline constexpr int kClipSampleRate = 24000;
inline constexpr double kClipSeconds = 1.0;

// One labeled event inside a clip.
struct SpatialEventLabel {
  std::string clip_id;
  EventClassId event_class = EventClassId::Bicycle;
  int azimuth_deg = 0;
  double onset_s = 0.0;
  double offset_s = 0.0;
  double snr_db = 0.0;
};

struct ClipRecord {
  std::string clip_id;
  int split = 0;  // 0 = train, 1 = test
  SceneId scene = SceneId::Indoor;
  std::vector<SpatialEventLabel> events;
};

inline const char* split_name(int split) { return split == 0 ? "train" : "test"; }

inline std::string clip_wav_path(const std::string& corpus_dir, const std::string& clip_id) {
  return corpus_dir + "/clips/" + clip_id + ".wav";
}

// Corpus description: one row per event, bare row for event-free clips.
struct CorpusManifest {
  std::uint64_t seed = 0;
  std::vector<ClipRecord> clips;

  static constexpr const char* kHeader =
      "clip_id,split,scene,event_class,azimuth_deg,onset_s,offset_s,snr_db";

  void write_csv(const std::string& path) const {
    std::string out(kHeader);
    out += "\n";
    for (const ClipRecord& c : clips) {
      const std::string prefix =
          c.clip_id + "," + split_name(c.split) + "," + scene_name(c.scene) + ",";
      if (c.events.empty()) {
        out += prefix + ",,,,\n";
        continue;
      }
      for (const SpatialEventLabel& e : c.events) {
        out += prefix + class_name(e.event_class) + "," + std::to_string(e.azimuth_deg) + "," +
               fmt_fixed(e.onset_s, 6) + "," + fmt_fixed(e.offset_s, 6) + "," +
               fmt_fixed(e.snr_db, 6) + "\n";
      }
    }
    write_text_file(path, out);
  }

  static CorpusManifest read_csv(const std::string& path) {
    CsvTable t = seldedge::read_csv(path);
    if (join_csv(t.header) != kHeader)
      fail(Errc::format_error, "unexpected manifest header in " + path);
    CorpusManifest m;
    for (const auto& row : t.rows) {
      if (row.size() != 8) fail(Errc::format_error, "bad manifest row in " + path);
      if (m.clips.empty() || m.clips.back().clip_id != row[0]) {
        ClipRecord c;
        c.clip_id = row[0];
        if (row[1] == "train")
          c.split = 0;
        else if (row[1] == "test")
          c.split = 1;
        else
          fail(Errc::format_error, "bad split tag '" + row[1] + "' in " + path);
        c.scene = parse_scene(row[2]);
        m.clips.push_back(std::move(c));
      }
      if (row[3].empty()) continue;  // event-free clip marker row
      SpatialEventLabel e;
      e.clip_id = row[0];
      e.event_class = parse_event_class(row[3]);
      e.azimuth_deg = static_cast<int>(parse_ll(row[4], "azimuth_deg"));
      e.onset_s = parse_double(row[5], "onset_s");
      e.offset_s = parse_double(row[6], "offset_s");
      e.snr_db = parse_double(row[7], "snr_db");
      m.clips.back().events.push_back(std::move(e));
    }
    return m;
  }
};

// Convolve a mono event through a 4-channel impulse response; output is
// truncated to the event's own length.
inline AudioClip spatialize(const AudioClip& event, const Rir& rir) {
  event.check();
  if (event.channels != 1) fail(Errc::invalid_argument, "spatialize: event must be mono");
  if (rir.ch.size() != 4) fail(Errc::invalid_argument, "spatialize: RIR must have 4 channels");
  if (rir.sample_rate != event.sample_rate)
    fail(Errc::invalid_argument, "spatialize: sample-rate mismatch between event and RIR");

  std::vector<double> x(event.length);
  for (int i = 0; i < event.length; ++i) x[i] = event.at(0, i);
  std::vector<std::vector<double>> y = convolve_many(x, rir.ch);

  AudioClip out = AudioClip::zeros(4, event.length, event.sample_rate);
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < event.length; ++i) out.at(m, i) = static_cast<float>(y[m][i]);
  return out;
}

// Gain g such that 20*log10(g*event_rms / background_rms) = target_snr_db.
inline double gain_for_snr(double event_rms, double background_rms, double target_snr_db) {
  if (event_rms < 1e-12 || background_rms < 1e-12)
    fail(Errc::invalid_argument, "gain_for_snr: RMS too small to set an SNR");
  return background_rms / event_rms * std::pow(10.0, target_snr_db / 20.0);
}

// synthesize_clip output: the mixture plus the exact stems it was built from,
// so SNR can be re-measured without blind source separation.
struct ClipStems {
  AudioClip mixture;                   // 4 ch, peak-normalized
  AudioClip background_stem;           // 4 ch, same normalization gain applied
  std::vector<AudioClip> event_stems;  // per event, full clip length, normalized
  double norm_gain = 1.0;
  std::vector<SpatialEventLabel> labels;
};

// Build one 1-second 4-channel clip: crop the background, spatialize each
// event at a random grid azimuth, mix at a random SNR from the scene range,
// peak-normalize with one shared gain.
inline ClipStems synthesize_clip(const AudioClip& background,
                                 const std::vector<std::pair<AudioClip, EventClassId>>& events,
                                 SceneId scene, const SceneEventPolicy& policy,
                                 const RirBank& rir_bank, std::uint64_t rng_seed) {
  background.check();
  const int sr = background.sample_rate;
  const int clip_len = static_cast<int>(kClipSeconds * sr);
  if (rir_bank.sample_rate() != sr)
    fail(Errc::invalid_argument, "synthesize_clip: RIR bank sample rate mismatch");
  if (background.length < clip_len)
    fail(Errc::invalid_argument, "synthesize_clip: background shorter than one clip");
  const SceneEventPolicy::Row& row = policy.row(scene);
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!policy.permits(scene, events[i].second))
      fail(Errc::invalid_argument, std::string("event class ") + class_name(events[i].second) +
                                       " not permitted in scene " + scene_name(scene));
    for (std::size_t j = i + 1; j < events.size(); ++j)
      if (events[i].second == events[j].second)
        fail(Errc::invalid_argument, std::string("duplicate event class in clip: ") +
                                         class_name(events[i].second));
  }

  Rng rng(rng_seed);

  // background crop
  const int max_start = background.length - clip_len;
  const int crop = max_start > 0 ? static_cast<int>(rng.uniform_index(max_start + 1)) : 0;
  AudioClip bg = background.slice(crop, clip_len);
  if (bg.channels == 1) bg = bg.replicated(4);
  if (bg.channels != 4)
    fail(Errc::invalid_argument, "synthesize_clip: background must be mono or 4-channel");

  ClipStems out;
  out.background_stem = bg;
  out.mixture = bg;

  for (const auto& [event_clip, cls] : events) {
    if (event_clip.channels != 1)
      fail(Errc::invalid_argument, "synthesize_clip: events must be mono");
    if (event_clip.sample_rate != sr)
      fail(Errc::invalid_argument, "synthesize_clip: event sample rate mismatch");

    const int az_index = static_cast<int>(rng.uniform_index(kNumAzimuths));
    const double snr_db = rng.uniform(row.snr_lo_db, row.snr_hi_db);

    AudioClip ev = event_clip.length > clip_len ? event_clip.slice(0, clip_len) : event_clip;
    AudioClip spat = spatialize(ev, rir_bank.at_index(az_index));

    const double max_onset_s = kClipSeconds - static_cast<double>(ev.length) / sr;
    const double onset_s = rng.uniform(0.0, max_onset_s);
    const int onset = static_cast<int>(std::lround(onset_s * sr));

    const double ev_rms = rms_all_channels(spat, 0, ev.length);
    const double bg_rms = rms_all_channels(bg, onset, onset + ev.length);
    const double g = gain_for_snr(ev_rms, bg_rms, snr_db);

    AudioClip stem = AudioClip::zeros(4, clip_len, sr);
    for (int m = 0; m < 4; ++m)
      for (int i = 0; i < ev.length; ++i)
        stem.at(m, onset + i) = static_cast<float>(g * spat.at(m, i));
    for (std::size_t k = 0; k < out.mixture.samples.size(); ++k)
      out.mixture.samples[k] += stem.samples[k];
    out.event_stems.push_back(std::move(stem));

    SpatialEventLabel label;
    label.event_class = cls;
    label.azimuth_deg = az_index * kAzimuthStepDeg;
    label.onset_s = static_cast<double>(onset) / sr;
    label.offset_s = static_cast<double>(onset + ev.length) / sr;
    label.snr_db = snr_db;
    out.labels.push_back(std::move(label));
  }

  const float peak = peak_abs(out.mixture);
  out.norm_gain = peak > 0.0f ? 0.99 / peak : 1.0;
  const float g = static_cast<float>(out.norm_gain);
  scale(out.mixture, g);
  scale(out.background_stem, g);
  for (AudioClip& stem : out.event_stems) scale(stem, g);
  return out;
}

// Optional user-supplied WAV pools replacing the procedural generators.
// Layout: <root>/events/<ClassName>/*.wav, <root>/backgrounds/<SceneName>/*.wav
struct SourcePool {
  bool enabled = false;
  std::array<std::vector<std::string>, kNumClasses> event_files;
  std::array<std::vector<std::string>, kNumScenes> background_files;

  static SourcePool scan(const std::string& root) {
    namespace fs = std::filesystem;
    SourcePool pool;
    if (root.empty()) return pool;
    pool.enabled = true;
    auto list_wavs = [](const std::string& dir) {
      std::vector<std::string> files;
      if (fs::is_directory(dir))
        for (const auto& entry : fs::directory_iterator(dir))
          if (entry.is_regular_file() && entry.path().extension() == ".wav")
            files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
      return files;
    };
    for (int c = 0; c < kNumClasses; ++c)
      pool.event_files[c] =
          list_wavs(root + "/events/" + class_name(static_cast<EventClassId>(c)));
    for (int s = 0; s < kNumScenes; ++s)
      pool.background_files[s] =
          list_wavs(root + "/backgrounds/" + scene_name(static_cast<SceneId>(s)));
    return pool;
  }
};

struct CorpusConfig {
  int n_train = 10800;
  int n_test = 1800;
  std::uint64_t seed = 1;
  int sample_rate = kClipSampleRate;
  int max_events_per_clip = 2;
  double min_event_s = 0.3;
  double max_event_s = 0.8;
  std::string out_dir;
  std::string rir_dir;      // empty: procedural RIR bank
  std::string source_pool;  // empty: procedural sources
  int threads = 0;          // 0: SELD_EDGE_THREADS or hardware concurrency
  SceneEventPolicy policy = SceneEventPolicy::standard();
};

// key=value config file; '#' starts a comment. SNR overrides take the form
// snr_indoor=5:20 (dB range lo:hi).
inline CorpusConfig parse_corpus_config(const std::string& path) {
  CorpusConfig cfg;
  const std::string text = read_file_text(path);
  int lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::format_error, path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto snr_range = [&](SceneId s) {
      std::vector<std::string> parts = split(val, val.find(':') != std::string::npos ? ':' : ',');
      if (parts.size() != 2) fail(Errc::format_error, "bad SNR range for " + key);
      auto& row = cfg.policy.rows[static_cast<int>(s)];
      row.snr_lo_db = parse_double(trim(parts[0]), key);
      row.snr_hi_db = parse_double(trim(parts[1]), key);
    };
    if (key == "n_train") cfg.n_train = static_cast<int>(parse_ll(val, key));
    else if (key == "n_test") cfg.n_test = static_cast<int>(parse_ll(val, key));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_ll(val, key));
    else if (key == "sample_rate") cfg.sample_rate = static_cast<int>(parse_ll(val, key));
    else if (key == "max_events") cfg.max_events_per_clip = static_cast<int>(parse_ll(val, key));
    else if (key == "min_event_s") cfg.min_event_s = parse_double(val, key);
    else if (key == "max_event_s") cfg.max_event_s = parse_double(val, key);
    else if (key == "rir_dir") cfg.rir_dir = val;
    else if (key == "source_pool") cfg.source_pool = val;
    else if (key == "threads") cfg.threads = static_cast<int>(parse_ll(val, key));
    else if (key == "snr_indoor") snr_range(SceneId::Indoor);
    else if (key == "snr_nature") snr_range(SceneId::Nature);
    else if (key == "snr_urban") snr_range(SceneId::Urban);
    else fail(Errc::format_error, path + ": unknown config key '" + key + "'");
  }
  return cfg;
}

namespace synthdetail {

inline AudioClip load_pool_clip(const std::string& file, int sr) {
  AudioClip clip = read_wav(file);
  if (clip.sample_rate != sr)
    fail(Errc::data_error, "pool clip sample rate mismatch: " + file);
  return clip.channels == 1 ? clip : clip.mono(0);
}

// All randomness for clip `index` derives from (seed, index), so any thread
// schedule produces an identical corpus.
inline ClipRecord make_clip(const CorpusConfig& cfg, const SourcePool& pool,
                            const RirBank& bank, std::size_t index) {
  const bool is_test = index >= static_cast<std::size_t>(cfg.n_train);
  const std::size_t local = is_test ? index - cfg.n_train : index;
  const SceneId scene = static_cast<SceneId>(local % kNumScenes);
  char id[16];
  std::snprintf(id, sizeof(id), "%s%06zu", is_test ? "te" : "tr", local);

  const std::uint64_t clip_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
  Rng rng(derive_seed(clip_seed, 0));

  const auto& allowed = cfg.policy.row(scene).allowed;
  const int max_events =
      std::min<int>(cfg.max_events_per_clip, static_cast<int>(allowed.size()));
  const int n_events = rng.uniform_int(0, max_events);

  // choose distinct classes: partial Fisher-Yates over the allowed set
  std::vector<EventClassId> deck = allowed;
  std::vector<EventClassId> chosen;
  for (int e = 0; e < n_events; ++e) {
    const std::size_t pick = e + rng.uniform_index(deck.size() - e);
    std::swap(deck[e], deck[pick]);
    chosen.push_back(deck[e]);
  }

  std::vector<std::pair<AudioClip, EventClassId>> events;
  for (EventClassId cls : chosen) {
    const double dur = rng.uniform(cfg.min_event_s, cfg.max_event_s);
    if (pool.enabled) {
      const auto& files = pool.event_files[static_cast<int>(cls)];
      AudioClip clip =
          load_pool_clip(files[rng.uniform_index(files.size())], cfg.sample_rate);
      events.emplace_back(std::move(clip), cls);
    } else {
      events.emplace_back(make_event(cls, dur, cfg.sample_rate, rng), cls);
    }
  }

  AudioClip background;
  if (pool.enabled) {
    const auto& files = pool.background_files[static_cast<int>(scene)];
    background = load_pool_clip(files[rng.uniform_index(files.size())], cfg.sample_rate);
  } else {
    background = make_background(scene, 1.5, cfg.sample_rate, rng);
  }

  ClipStems stems = synthesize_clip(background, events, scene, cfg.policy, bank,
                                    derive_seed(clip_seed, 1));
  write_wav(clip_wav_path(cfg.out_dir, id), stems.mixture);

  ClipRecord rec;
  rec.clip_id = id;
  rec.split = is_test ? 1 : 0;
  rec.scene = scene;
  rec.events = std::move(stems.labels);
  for (SpatialEventLabel& e : rec.events) e.clip_id = id;
  return rec;
}

}  // namespace synthdetail

// Emit the full corpus (WAV files + manifest.csv) under cfg.out_dir.
inline CorpusManifest build_corpus(const CorpusConfig& cfg) {
  if (cfg.n_train < 0 || cfg.n_test < 0 || cfg.out_dir.empty())
    fail(Errc::invalid_argument, "build_corpus: bad counts or missing out_dir");
  const SourcePool pool = SourcePool::scan(cfg.source_pool);
  if (pool.enabled) {
    for (int s = 0; s < kNumScenes; ++s) {
      const SceneId scene = static_cast<SceneId>(s);
      if (pool.background_files[s].empty())
        fail(Errc::missing_file,
             std::string("insufficient source material: no backgrounds for scene ") +
                 scene_name(scene));
      for (EventClassId cls : cfg.policy.row(scene).allowed)
        if (pool.event_files[static_cast<int>(cls)].empty())
          fail(Errc::missing_file, std::string("insufficient source material: scene ") +
                                       scene_name(scene) + ", class " + class_name(cls));
    }
  }
  const RirBank bank = cfg.rir_dir.empty() ? RirBank::procedural(cfg.sample_rate)
                                           : RirBank::from_wav_dir(cfg.rir_dir);

  std::filesystem::create_directories(cfg.out_dir + "/clips");

  const std::size_t total = static_cast<std::size_t>(cfg.n_train) + cfg.n_test;
  std::vector<ClipRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      try {
        records[i] = synthdetail::make_clip(cfg, pool, bank, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int n_threads = cfg.threads > 0 ? cfg.threads : worker_thread_cap();
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(std::max<std::size_t>(total, 1))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  CorpusManifest manifest;
  manifest.seed = cfg.seed;
  manifest.clips = std::move(records);
  manifest.write_csv(cfg.out_dir + "/manifest.csv");
  return manifest;
}

}  // namespace seldedge
