// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// seld-edge: command-line front end for the toolkit headers.
//
// Every subcommand validates its input paths before doing work, writes its
// artifacts under --out, and drops a run_manifest.json there recording the
// effective configuration plus FNV-1a 64 hashes of all inputs and outputs.
// Given identical inputs and seeds, artifacts are byte-identical, so the
// manifest doubles as a reproducibility receipt. Paths are recorded exactly
// as given; invoke with relative paths if manifests themselves must compare
// equal across directories.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage error, 3 missing
// file, 4 format violation, 5 invalid argument, 6 I/O failure, 7 data
// inconsistency. Failures print a single machine-readable line to stderr:
//   error,<category>,<message>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seldedge/seldedge.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace seldedge;

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return 5;
    case Errc::format_error: return 4;
    case Errc::missing_file: return 3;
    case Errc::io_error: return 6;
    case Errc::data_error: return 7;
  }
  return 1;
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

// Shortest decimal that round-trips a binary32 value.
std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) fail(Errc::missing_file, "no such file: " + path);
}

void require_dir(const std::string& path) {
  if (!fs::is_directory(path)) fail(Errc::missing_file, "no such directory: " + path);
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) fail(Errc::io_error, "cannot create directory " + path + ": " + ec.message());
}

// Inputs are hashed when noted, outputs when the manifest is written, so
// output entries may be registered before the files exist.
struct RunLog {
  std::string command;
  std::string out_dir;
  json config = json::object();
  std::map<std::string, std::string> inputs;
  std::vector<std::string> output_names;

  void input(const std::string& path) { inputs[path] = to_hex(hash_file(path)); }
  void output(const std::string& rel) { output_names.push_back(rel); }

  void write() const {
    if (out_dir.empty()) return;
    std::map<std::string, std::string> outputs;
    for (const std::string& rel : output_names)
      outputs[rel] = to_hex(hash_file(out_dir + "/" + rel));
    json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    write_text_file(out_dir + "/run_manifest.json", j.dump(2) + "\n");
  }
};

// ---------------------------------------------------------------------------
// model loading

struct ModelOpts {
  std::string spec_path;
  std::string weights_path;
  bool random = false;
  std::uint64_t seed = 1;
};

Model load_model(const ModelOpts& mo, RunLog& log, const std::string& role) {
  if (mo.spec_path.empty())
    fail(Errc::invalid_argument, role + ": network spec required (--spec <file>)");
  require_file(mo.spec_path);
  NetworkSpec spec = load_network_config(mo.spec_path);
  spec.compose();
  log.input(mo.spec_path);
  WeightFile wf;
  if (mo.random) {
    wf = random_weights(spec, mo.seed);
  } else {
    if (mo.weights_path.empty())
      fail(Errc::invalid_argument, role + ": pass --weights <file.nnwf> or --random-weights");
    require_file(mo.weights_path);
    wf = WeightFile::read(mo.weights_path);
    log.input(mo.weights_path);
  }
  return Model(std::move(spec), std::move(wf));
}

// ---------------------------------------------------------------------------
// CSV adapters shared by infer / decode / eval

std::string output_csv_header(OutputContract contract) {
  std::string h = "t_s";
  if (contract == OutputContract::Accdoa2D) {
    for (int c = 0; c < kNumClasses; ++c)
      h += std::string(",x_") + class_name(static_cast<EventClassId>(c));
    for (int c = 0; c < kNumClasses; ++c)
      h += std::string(",y_") + class_name(static_cast<EventClassId>(c));
  } else {
    for (int s = 0; s < kNumScenes; ++s)
      h += std::string(",logit_") + scene_name(static_cast<SceneId>(s));
  }
  return h;
}

void write_output_csv(const std::string& path, const NnOutput& out, OutputContract contract) {
  std::string text = output_csv_header(contract) + "\n";
  for (int t = 0; t < out.frames; ++t) {
    text += fmt_g(t * out.frame_hop_s);
    for (int i = 0; i < out.dim; ++i) text += "," + fmt_g(out.at(t, i));
    text += "\n";
  }
  write_text_file(path, text);
}

AccdoaFrameSeq read_accdoa_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const std::string expected = output_csv_header(OutputContract::Accdoa2D);
  if (join_csv(t.header) != expected)
    fail(Errc::format_error, path + ": expected activity-map header '" + expected + "'");
  const int frames = static_cast<int>(t.rows.size());
  if (frames == 0) fail(Errc::format_error, path + ": no frames");
  double hop = 300.0 / 24000.0;
  if (frames >= 2)
    hop = parse_double(t.rows[1][0], "t_s") - parse_double(t.rows[0][0], "t_s");
  if (!(hop > 0.0)) fail(Errc::format_error, path + ": non-increasing t_s column");
  AccdoaFrameSeq seq = AccdoaFrameSeq::zeros(frames, hop);
  for (int r = 0; r < frames; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    if (row.size() != 1 + 2 * static_cast<std::size_t>(kNumClasses))
      fail(Errc::format_error, path + ": row " + std::to_string(r + 2) + " has wrong arity");
    for (int c = 0; c < kNumClasses; ++c) {
      seq.x(r, c) = static_cast<float>(parse_double(row[1 + c], "x"));
      seq.y(r, c) = static_cast<float>(parse_double(row[1 + kNumClasses + c], "y"));
    }
  }
  return seq;
}

const char kEventsHeader[] = "clip_id,event_class,azimuth_deg,onset_s,offset_s,mean_activity";

void append_event_rows(std::string& text, const std::string& clip_id,
                       const std::vector<DetectionEvent>& events) {
  for (const DetectionEvent& e : events)
    text += clip_id + "," + class_name(e.event_class) + "," + fmt_g(e.azimuth_deg) + "," +
            fmt_g(e.onset_s) + "," + fmt_g(e.offset_s) + "," + fmt_g(e.mean_activity) + "\n";
}

std::vector<ClipPredictions> read_predictions_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (join_csv(t.header) != kEventsHeader)
    fail(Errc::format_error, path + ": expected header '" + std::string(kEventsHeader) + "'");
  std::vector<ClipPredictions> preds;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() != 6)
      fail(Errc::format_error, path + ": row " + std::to_string(r + 2) + " has wrong arity");
    auto [it, fresh] = index.try_emplace(row[0], preds.size());
    if (fresh) preds.push_back(ClipPredictions{row[0], {}});
    DetectionEvent e;
    e.event_class = parse_event_class(row[1]);
    e.azimuth_deg = parse_double(row[2], "azimuth_deg");
    e.onset_s = parse_double(row[3], "onset_s");
    e.offset_s = parse_double(row[4], "offset_s");
    e.mean_activity = parse_double(row[5], "mean_activity");
    preds[it->second].events.push_back(e);
  }
  return preds;
}

std::map<std::string, SceneId> read_scene_predictions_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (join_csv(t.header) != "clip_id,scene")
    fail(Errc::format_error, path + ": expected header 'clip_id,scene'");
  std::map<std::string, SceneId> scenes;
  for (const auto& row : t.rows) {
    if (row.size() != 2) fail(Errc::format_error, path + ": rows must be clip_id,scene");
    if (!scenes.emplace(row[0], parse_scene(row[1])).second)
      fail(Errc::data_error, path + ": duplicate scene prediction for " + row[0]);
  }
  return scenes;
}

// ---------------------------------------------------------------------------
// threshold / grid helpers

ThresholdMatrix load_thresholds(const std::string& path, RunLog& log) {
  if (path.empty()) return ThresholdMatrix::uniform(0.5);
  require_file(path);
  ThresholdMatrix tm = ThresholdMatrix::load(path);
  log.input(path);
  return tm;
}

// "lo:hi:step" or a comma-separated list of candidate thresholds.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3)
      fail(Errc::invalid_argument, "--grid must be lo:hi:step or a comma list");
    const double lo = parse_double(trim(parts[0]), "grid lo");
    const double hi = parse_double(trim(parts[1]), "grid hi");
    const double step = parse_double(trim(parts[2]), "grid step");
    if (!(step > 0.0) || hi < lo)
      fail(Errc::invalid_argument, "--grid range must have hi >= lo and step > 0");
    for (int i = 0;; ++i) {
      const double v = lo + i * step;
      if (v > hi + 1e-12) break;
      grid.push_back(v);
    }
  } else {
    for (const std::string& f : split(s, ','))
      grid.push_back(parse_double(trim(f), "grid value"));
  }
  return grid;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
  std::string config_path, out, pool, rir;
  int n_train = 0, n_test = 0, max_events = 0, threads = 0, sample_rate = 0;
  double min_event_s = 0, max_event_s = 0;
  std::uint64_t seed = 0;
  bool quiet = false;
  CLI::Option *o_n_train = nullptr, *o_n_test = nullptr, *o_seed = nullptr,
              *o_sample_rate = nullptr, *o_max_events = nullptr, *o_min_event = nullptr,
              *o_max_event = nullptr, *o_threads = nullptr;
};

int run_synth(const SynthOpts& o) {
  RunLog log;
  log.command = "synth";
  CorpusConfig cfg;
  if (!o.config_path.empty()) {
    require_file(o.config_path);
    cfg = parse_corpus_config(o.config_path);
    log.input(o.config_path);
  }
  if (o.o_n_train->count()) cfg.n_train = o.n_train;
  if (o.o_n_test->count()) cfg.n_test = o.n_test;
  if (o.o_seed->count()) cfg.seed = o.seed;
  if (o.o_sample_rate->count()) cfg.sample_rate = o.sample_rate;
  if (o.o_max_events->count()) cfg.max_events_per_clip = o.max_events;
  if (o.o_min_event->count()) cfg.min_event_s = o.min_event_s;
  if (o.o_max_event->count()) cfg.max_event_s = o.max_event_s;
  if (o.o_threads->count()) cfg.threads = o.threads;
  if (!o.pool.empty()) cfg.source_pool = o.pool;
  if (!o.rir.empty()) cfg.rir_dir = o.rir;
  cfg.out_dir = o.out;

  ensure_dir(o.out);
  log.out_dir = o.out;
  const CorpusManifest manifest = build_corpus(cfg);

  log.config["n_train"] = cfg.n_train;
  log.config["n_test"] = cfg.n_test;
  log.config["seed"] = cfg.seed;
  log.config["sample_rate"] = cfg.sample_rate;
  log.config["max_events_per_clip"] = cfg.max_events_per_clip;
  log.config["min_event_s"] = cfg.min_event_s;
  log.config["max_event_s"] = cfg.max_event_s;
  log.config["source_pool"] = cfg.source_pool;
  log.config["rir_dir"] = cfg.rir_dir;
  log.output("manifest.csv");
  for (const ClipRecord& r : manifest.clips) log.output("clips/" + r.clip_id + ".wav");
  log.write();

  if (!o.quiet) {
    std::size_t events = 0;
    for (const ClipRecord& r : manifest.clips) events += r.events.size();
    std::printf("clips,%zu\nevents,%zu\nseed,%llu\nout,%s\n", manifest.clips.size(), events,
                static_cast<unsigned long long>(cfg.seed), o.out.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// features

struct FeaturesOpts {
  std::string in_wav, corpus, out;
  std::string kind = "both";
  bool quiet = false;
};

int run_features(const FeaturesOpts& o) {
  if (o.in_wav.empty() == o.corpus.empty())
    fail(Errc::invalid_argument, "features: pass exactly one of --in or --corpus");
  RunLog log;
  log.command = "features";
  log.out_dir = o.out;
  log.config["kind"] = o.kind;
  ensure_dir(o.out);

  std::size_t written = 0;
  auto emit = [&](const AudioClip& clip, const std::string& stem) {
    if (o.kind != "logmel") {
      const FeatureTensor ft = salsa_lite(clip);
      ft.write(o.out + "/" + stem + ".salsa.ftns");
      log.output(stem + ".salsa.ftns");
      ++written;
    }
    if (o.kind != "salsa") {
      const AudioClip mono = clip.channels == 1 ? clip : clip.mono(0);
      const FeatureTensor ft = log_mel(mono);
      ft.write(o.out + "/" + stem + ".logmel.ftns");
      log.output(stem + ".logmel.ftns");
      ++written;
    }
  };

  if (!o.in_wav.empty()) {
    require_file(o.in_wav);
    log.input(o.in_wav);
    log.config["in"] = o.in_wav;
    emit(read_wav(o.in_wav), fs::path(o.in_wav).stem().string());
  } else {
    require_dir(o.corpus);
    const std::string mpath = o.corpus + "/manifest.csv";
    require_file(mpath);
    const CorpusManifest manifest = CorpusManifest::read_csv(mpath);
    log.input(mpath);
    log.config["corpus"] = o.corpus;
    for (const ClipRecord& r : manifest.clips) {
      const std::string wav = clip_wav_path(o.corpus, r.clip_id);
      require_file(wav);
      log.input(wav);
      emit(read_wav(wav), r.clip_id);
    }
  }
  log.write();
  if (!o.quiet) std::printf("tensors,%zu\nout,%s\n", written, o.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// infer

struct InferOpts {
  std::string features, out;
  ModelOpts model;
  bool quiet = false;
};

int run_infer(const InferOpts& o) {
  RunLog log;
  log.command = "infer";
  const Model model = load_model(o.model, log, "infer");
  require_file(o.features);
  const FeatureTensor ft = FeatureTensor::read(o.features);
  log.input(o.features);

  const NnOutput out = model.forward(ft);
  ensure_dir(o.out);
  log.out_dir = o.out;
  write_output_csv(o.out + "/output.csv", out, model.spec().output);
  log.output("output.csv");

  log.config["features"] = o.features;
  log.config["spec"] = o.model.spec_path;
  log.config["random_weights"] = o.model.random;
  log.config["seed"] = o.model.seed;
  log.config["output"] =
      model.spec().output == OutputContract::Accdoa2D ? "accdoa" : "scene_logits";
  log.write();

  if (!o.quiet) {
    std::printf("frames,%d\ndim,%d\nframe_hop_s,%s\n", out.frames, out.dim,
                fmt_g(out.frame_hop_s).c_str());
    if (model.spec().output == OutputContract::SceneLogits)
      std::printf("scene,%s\n", scene_name(static_cast<SceneId>(classify_scene(out))));
    std::printf("out,%s/output.csv\n", o.out.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// decode

struct DecodeOpts {
  std::string in, thresholds, scene, clip_id = "clip", out;
  int gap_frames = 0, min_frames = 1;
  bool quiet = false;
};

int run_decode(const DecodeOpts& o) {
  RunLog log;
  log.command = "decode";
  require_file(o.in);
  const AccdoaFrameSeq seq = read_accdoa_csv(o.in);
  log.input(o.in);
  const ThresholdMatrix tm = load_thresholds(o.thresholds, log);
  std::optional<SceneId> scene;
  if (!o.scene.empty()) scene = parse_scene(o.scene);
  DecodeConfig dc;
  dc.gap_frames = o.gap_frames;
  dc.min_frames = o.min_frames;

  const std::vector<DetectionEvent> events = decode(seq, scene, tm, dc);
  ensure_dir(o.out);
  log.out_dir = o.out;
  std::string text = std::string(kEventsHeader) + "\n";
  append_event_rows(text, o.clip_id, events);
  write_text_file(o.out + "/events.csv", text);
  log.output("events.csv");

  log.config["in"] = o.in;
  log.config["thresholds"] = o.thresholds.empty() ? "uniform(0.5)" : o.thresholds;
  log.config["scene"] = o.scene;
  log.config["clip_id"] = o.clip_id;
  log.config["gap_frames"] = o.gap_frames;
  log.config["min_frames"] = o.min_frames;
  log.write();

  if (!o.quiet) std::printf("events,%zu\nout,%s/events.csv\n", events.size(), o.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneOpts {
  std::string corpus, out, grid_str;
  std::string split = "train";
  ModelOpts model;
  double theta_max = kThetaMaxDeg;
  int gap_frames = 0, min_frames = 1;
  bool quiet = false;
};

bool split_selected(const std::string& split, int clip_split) {
  return split == "all" || (split == "train" && clip_split == 0) ||
         (split == "test" && clip_split == 1);
}

int run_tune(const TuneOpts& o) {
  RunLog log;
  log.command = "tune";
  require_dir(o.corpus);
  const std::string mpath = o.corpus + "/manifest.csv";
  require_file(mpath);
  const CorpusManifest manifest = CorpusManifest::read_csv(mpath);
  log.input(mpath);
  const Model model = load_model(o.model, log, "tune");
  const std::vector<double> grid = o.grid_str.empty() ? default_tune_grid() : parse_grid(o.grid_str);

  std::vector<AccdoaFrameSeq> preds;
  std::vector<std::vector<SpatialEventLabel>> truths;
  std::vector<SceneId> scenes;
  for (const ClipRecord& r : manifest.clips) {
    if (!split_selected(o.split, r.split)) continue;
    const std::string wav = clip_wav_path(o.corpus, r.clip_id);
    require_file(wav);
    log.input(wav);
    preds.push_back(AccdoaFrameSeq::from_output(model.forward(salsa_lite(read_wav(wav)))));
    truths.push_back(r.events);
    scenes.push_back(r.scene);
  }
  if (preds.empty()) fail(Errc::data_error, "tune: no clips in split '" + o.split + "'");

  DecodeConfig dc;
  dc.gap_frames = o.gap_frames;
  dc.min_frames = o.min_frames;
  const ThresholdMatrix tm = tune_thresholds(preds, truths, scenes, grid, o.theta_max, dc);

  ensure_dir(o.out);
  log.out_dir = o.out;
  tm.save(o.out + "/thresholds.json");
  log.output("thresholds.json");

  log.config["corpus"] = o.corpus;
  log.config["split"] = o.split;
  log.config["clips"] = preds.size();
  log.config["theta_max_deg"] = o.theta_max;
  log.config["grid"] = grid;
  log.config["spec"] = o.model.spec_path;
  log.config["random_weights"] = o.model.random;
  log.config["seed"] = o.model.seed;
  log.config["gap_frames"] = o.gap_frames;
  log.config["min_frames"] = o.min_frames;
  log.write();

  if (!o.quiet) {
    std::printf("scene,class,tau\n");
    for (int s = 0; s < kNumScenes; ++s)
      for (int c = 0; c < kNumClasses; ++c)
        std::printf("%s,%s,%s\n", scene_name(static_cast<SceneId>(s)),
                    class_name(static_cast<EventClassId>(c)), fmt_g(tm.tau[s][c]).c_str());
    std::printf("tau_global,%s\nout,%s/thresholds.json\n", fmt_g(tm.tau_global).c_str(),
                o.out.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string preds, manifest, scene_preds, out;
  std::string split = "all";
  double theta_max = kThetaMaxDeg;
  bool quiet = false;
};

int run_eval(const EvalOpts& o) {
  RunLog log;
  log.command = "eval";
  require_file(o.preds);
  require_file(o.manifest);
  const std::vector<ClipPredictions> predictions = read_predictions_csv(o.preds);
  log.input(o.preds);
  CorpusManifest manifest = CorpusManifest::read_csv(o.manifest);
  log.input(o.manifest);
  if (o.split != "all") {
    std::vector<ClipRecord> kept;
    for (ClipRecord& r : manifest.clips)
      if (split_selected(o.split, r.split)) kept.push_back(std::move(r));
    manifest.clips = std::move(kept);
  }

  std::map<std::string, SceneId> scene_map;
  if (!o.scene_preds.empty()) {
    require_file(o.scene_preds);
    scene_map = read_scene_predictions_csv(o.scene_preds);
    log.input(o.scene_preds);
  }

  std::array<std::array<long long, 2>, kNumScenes> totals{};
  const EvalReport rep =
      evaluate_corpus(manifest, predictions, scene_map, o.theta_max, &totals);

  std::string text = rep.report_csv();
  if (!o.quiet) std::fputs(text.c_str(), stdout);
  std::string scene_text;
  if (!scene_map.empty()) {
    scene_text = rep.scene_accuracy_csv(totals);
    if (!o.quiet) std::fputs(scene_text.c_str(), stdout);
  }

  if (!o.out.empty()) {
    ensure_dir(o.out);
    log.out_dir = o.out;
    write_text_file(o.out + "/report.csv", text);
    log.output("report.csv");
    if (!scene_text.empty()) {
      write_text_file(o.out + "/scene_accuracy.csv", scene_text);
      log.output("scene_accuracy.csv");
    }
    log.config["preds"] = o.preds;
    log.config["manifest"] = o.manifest;
    log.config["scene_preds"] = o.scene_preds;
    log.config["split"] = o.split;
    log.config["theta_max_deg"] = o.theta_max;
    log.write();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// stream / bench share their model assembly

struct PipeOpts {
  ModelOpts seld, asc;
  std::string thresholds;
  std::string policy = "latest";
  bool scripted = false;
  std::size_t queue = 4;
  double chunk_seconds = 1.0;
  int sample_rate = 24000;
  std::uint64_t seed = 1;
};

std::pair<Model, Model> make_pipeline_models(const PipeOpts& o, int chunk_samples, RunLog& log) {
  const bool scripted = o.scripted || o.seld.spec_path.empty();
  log.config["models"] = scripted ? "scripted" : "files";
  if (scripted) {
    StubScript seld;
    seld.behavior = StubBehavior::EnergyGate;
    seld.target_class = EventClassId::CarHorn;
    seld.seld_frames = (chunk_samples + 299) / 300;
    StubScript asc;
    asc.behavior = StubBehavior::ConstantScene;
    asc.scene = SceneId::Urban;
    asc.asc_frames = (chunk_samples + 799) / 800;
    auto [sspec, swf] = stub_model(seld);
    auto [aspec, awf] = stub_model(asc);
    return {Model(std::move(sspec), std::move(swf)), Model(std::move(aspec), std::move(awf))};
  }
  if (o.asc.spec_path.empty())
    fail(Errc::invalid_argument, "pipeline: pass --asc-spec/--asc-weights or --scripted");
  ModelOpts seld = o.seld, asc = o.asc;
  seld.seed = derive_seed(o.seed, 1);
  asc.seed = derive_seed(o.seed, 2);
  Model seld_model = load_model(seld, log, "seld model");
  Model asc_model = load_model(asc, log, "asc model");
  return {std::move(seld_model), std::move(asc_model)};
}

void log_pipe_config(const PipeOpts& o, const PipelineConfig& pc, RunLog& log) {
  log.config["policy"] = o.policy;
  log.config["queue_capacity"] = pc.queue_capacity;
  log.config["chunk_seconds"] = pc.chunk_seconds;
  log.config["sample_rate"] = pc.sample_rate;
  log.config["seed"] = o.seed;
  log.config["thresholds"] = o.thresholds.empty() ? "uniform(0.5)" : o.thresholds;
  log.config["spec"] = o.seld.spec_path;
  log.config["asc_spec"] = o.asc.spec_path;
}

struct StreamOpts {
  PipeOpts pipe;
  std::string in_wav, out;
  std::size_t chunks = 10;
  bool live_drop = false;
  int gap_frames = 0, min_frames = 1;
  bool quiet = false;
};

int run_stream(const StreamOpts& o) {
  RunLog log;
  log.command = "stream";

  PipelineConfig pc;
  pc.sample_rate = o.pipe.sample_rate;
  pc.chunk_seconds = o.pipe.chunk_seconds;
  pc.queue_capacity = o.pipe.queue;
  pc.policy = o.pipe.policy == "synced" ? ScenePolicy::Synced : ScenePolicy::LatestWins;
  pc.live_drop = o.live_drop;
  pc.decode.gap_frames = o.gap_frames;
  pc.decode.min_frames = o.min_frames;

  ChunkSource source;
  std::size_t n_chunks = o.chunks;
  if (!o.in_wav.empty()) {
    require_file(o.in_wav);
    auto clip = std::make_shared<AudioClip>(read_wav(o.in_wav));
    log.input(o.in_wav);
    log.config["in"] = o.in_wav;
    pc.sample_rate = clip->sample_rate;
    const int cs = pc.chunk_samples();
    n_chunks = static_cast<std::size_t>(clip->length / cs);
    if (n_chunks == 0) fail(Errc::data_error, "stream: input shorter than one chunk");
    auto next = std::make_shared<std::size_t>(0);
    source = [clip, next, cs, n_chunks]() -> std::optional<AudioClip> {
      if (*next >= n_chunks) return std::nullopt;
      return clip->slice(static_cast<int>((*next)++ * static_cast<std::size_t>(cs)), cs);
    };
  } else {
    source = synthetic_chunk_source(n_chunks, o.pipe.seed, pc.sample_rate, pc.chunk_samples());
  }

  auto models = make_pipeline_models(o.pipe, pc.chunk_samples(), log);
  const ThresholdMatrix tm = load_thresholds(o.pipe.thresholds, log);
  Pipeline pipeline(pc, std::move(models.first), std::move(models.second), tm);

  const RunSummary summary = pipeline.run(source, [&](const StreamResult& r) {
    if (!o.quiet) std::printf("%s\n", stream_line(r).c_str());
  });

  if (!o.out.empty()) {
    ensure_dir(o.out);
    log.out_dir = o.out;
    std::string text = "index,scene,events,end_to_end_ms\n";
    for (const StreamResult& r : summary.results) text += stream_line(r) + "\n";
    write_text_file(o.out + "/stream.csv", text);
    log.output("stream.csv");
    log_pipe_config(o.pipe, pc, log);
    log.config["chunks"] = n_chunks;
    log.config["live_drop"] = o.live_drop;
    log.config["gap_frames"] = o.gap_frames;
    log.config["min_frames"] = o.min_frames;
    log.write();
  }

  if (!o.quiet)
    std::printf("submitted,%zu\nprocessed,%zu\ndropped,%zu\n", summary.submitted,
                summary.processed, summary.dropped);
  return 0;
}

struct BenchOpts {
  PipeOpts pipe;
  std::string out;
  std::size_t chunks = 1000;
  bool quiet = false;
};

int run_bench(const BenchOpts& o) {
  RunLog log;
  log.command = "bench";

  PipelineConfig pc;
  pc.sample_rate = o.pipe.sample_rate;
  pc.chunk_seconds = o.pipe.chunk_seconds;
  pc.queue_capacity = o.pipe.queue;
  pc.policy = o.pipe.policy == "synced" ? ScenePolicy::Synced : ScenePolicy::LatestWins;

  auto models = make_pipeline_models(o.pipe, pc.chunk_samples(), log);
  const ThresholdMatrix tm = load_thresholds(o.pipe.thresholds, log);
  Pipeline pipeline(pc, std::move(models.first), std::move(models.second), tm);

  const BenchmarkReport rep = benchmark_pipeline(pipeline, o.chunks, o.pipe.seed);
  const std::string text = rep.csv();
  if (!o.quiet) {
    std::fputs(text.c_str(), stdout);
    std::printf("chunks,%zu\nordered,%s\nmean_end_to_end_ms,%s\n", rep.chunks,
                rep.ordered ? "true" : "false", fmt_fixed(rep.mean_end_to_end_ms, 3).c_str());
  }

  if (!o.out.empty()) {
    ensure_dir(o.out);
    log.out_dir = o.out;
    write_text_file(o.out + "/benchmark.csv", text);
    log.output("benchmark.csv");
    log_pipe_config(o.pipe, pc, log);
    log.config["chunks"] = o.chunks;
    log.write();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// complexity

struct ComplexityOpts {
  std::string spec, out;
  bool quiet = false;
};

int run_complexity(const ComplexityOpts& o) {
  RunLog log;
  log.command = "complexity";
  require_file(o.spec);
  NetworkSpec spec = load_network_config(o.spec);
  spec.compose();
  log.input(o.spec);

  const std::size_t params = count_params(spec);
  const std::size_t macs = count_macs(spec);
  // Published baselines for this model family (1-second input clip).
  const bool accdoa = spec.output == OutputContract::Accdoa2D;
  const unsigned long long ref_params = accdoa ? 285000ULL : 116000ULL;
  const unsigned long long ref_macs = accdoa ? 91400000ULL : 10900000ULL;

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "metric,value,reference\nparams,%zu,%llu\nmacs_per_1s_clip,%zu,%llu\n", params,
                ref_params, macs, ref_macs);
  const std::string text = buf;
  if (!o.quiet) std::fputs(text.c_str(), stdout);

  if (!o.out.empty()) {
    ensure_dir(o.out);
    log.out_dir = o.out;
    write_text_file(o.out + "/complexity.csv", text);
    log.output("complexity.csv");
    log.config["spec"] = o.spec;
    log.write();
  }
  return 0;
}

// ---------------------------------------------------------------------------

void add_model_flags(CLI::App* cmd, ModelOpts& mo, bool with_seed = true) {
  cmd->add_option("--spec", mo.spec_path, "network config file (layer stack)");
  cmd->add_option("--weights", mo.weights_path, "weight file (.nnwf)");
  cmd->add_flag("--random-weights", mo.random, "draw weights from --seed instead of a file");
  if (with_seed)
    cmd->add_option("--seed", mo.seed, "RNG seed (unsigned integer)")->capture_default_str();
}

void add_pipe_flags(CLI::App* cmd, PipeOpts& po) {
  add_model_flags(cmd, po.seld, false);
  cmd->add_option("--asc-spec", po.asc.spec_path, "scene classifier network config file");
  cmd->add_option("--asc-weights", po.asc.weights_path, "scene classifier weight file (.nnwf)");
  cmd->add_flag("--scripted", po.scripted,
                "use built-in scripted models (default when --spec is absent)");
  cmd->add_option("--thresholds", po.thresholds,
                  "scene-conditioned threshold matrix (.json); default uniform 0.5");
  cmd->add_option("--policy", po.policy, "scene conditioning policy: latest or synced")
      ->check(CLI::IsMember({"latest", "synced"}))
      ->capture_default_str();
  cmd->add_option("--queue", po.queue, "bounded queue capacity (chunks)")->capture_default_str();
  cmd->add_option("--chunk-seconds", po.chunk_seconds, "chunk length (seconds)")
      ->capture_default_str();
  cmd->add_option("--sample-rate", po.sample_rate, "synthetic source sample rate (Hz)")
      ->capture_default_str();
  cmd->add_option("--seed", po.seed, "RNG seed (unsigned integer)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "seld-edge: scene-conditioned sound event localization and detection toolkit\n"
      "Artifacts land under --out together with run_manifest.json (inputs, config\n"
      "and output hashes). Exit codes: 0 ok, 2 usage, 3 missing file, 4 format\n"
      "violation, 5 invalid argument, 6 I/O failure, 7 data inconsistency."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");

  SynthOpts so;
  auto* synth = app.add_subcommand("synth", "synthesize a labelled 4-channel corpus");
  synth->add_option("--config", so.config_path, "corpus config file (key=value lines)");
  synth->add_option("--out", so.out, "output directory")->required();
  so.o_n_train = synth->add_option("--n-train", so.n_train, "training clips (count)");
  so.o_n_test = synth->add_option("--n-test", so.n_test, "test clips (count)");
  so.o_seed = synth->add_option("--seed", so.seed, "corpus seed (unsigned integer)");
  so.o_sample_rate = synth->add_option("--sample-rate", so.sample_rate, "sample rate (Hz)");
  so.o_max_events = synth->add_option("--max-events", so.max_events, "max events per clip (count)");
  so.o_min_event = synth->add_option("--min-event-s", so.min_event_s, "min event length (seconds)");
  so.o_max_event = synth->add_option("--max-event-s", so.max_event_s, "max event length (seconds)");
  so.o_threads = synth->add_option("--threads", so.threads,
                                   "worker threads (0 = SELD_EDGE_THREADS or all cores)");
  synth->add_option("--pool", so.pool, "WAV source pool directory (events/, backgrounds/)");
  synth->add_option("--rir", so.rir, "measured RIR directory (az<deg>.wav, 4-channel)");
  synth->add_flag("--quiet", so.quiet, "suppress stdout summary");

  FeaturesOpts fo;
  auto* features = app.add_subcommand("features", "extract feature tensors from WAV audio");
  features->add_option("--in", fo.in_wav, "single WAV file (float32)");
  features->add_option("--corpus", fo.corpus, "corpus directory (manifest.csv + clips/)");
  features->add_option("--kind", fo.kind, "tensor kind: salsa, logmel or both")
      ->check(CLI::IsMember({"salsa", "logmel", "both"}))
      ->capture_default_str();
  features->add_option("--out", fo.out, "output directory")->required();
  features->add_flag("--quiet", fo.quiet, "suppress stdout summary");

  InferOpts io;
  auto* infer = app.add_subcommand("infer", "run a network forward pass over a feature tensor");
  infer->add_option("--features", io.features, "input feature tensor (.ftns)")->required();
  add_model_flags(infer, io.model);
  infer->add_option("--out", io.out, "output directory")->required();
  infer->add_flag("--quiet", io.quiet, "suppress stdout summary");

  DecodeOpts dop;
  auto* dec = app.add_subcommand("decode", "turn an activity-map CSV into detection events");
  dec->add_option("--in", dop.in, "activity-map CSV from infer")->required();
  dec->add_option("--thresholds", dop.thresholds,
                  "threshold matrix (.json); default uniform 0.5");
  dec->add_option("--scene", dop.scene, "scene name conditioning the thresholds");
  dec->add_option("--clip-id", dop.clip_id, "clip id written to the events CSV")
      ->capture_default_str();
  dec->add_option("--gap-frames", dop.gap_frames, "merge gaps up to this many frames")
      ->capture_default_str();
  dec->add_option("--min-frames", dop.min_frames, "drop events shorter than this many frames")
      ->capture_default_str();
  dec->add_option("--out", dop.out, "output directory")->required();
  dec->add_flag("--quiet", dop.quiet, "suppress stdout summary");

  TuneOpts to;
  auto* tune = app.add_subcommand("tune", "grid-search scene-conditioned decision thresholds");
  tune->add_option("--corpus", to.corpus, "corpus directory (manifest.csv + clips/)")->required();
  add_model_flags(tune, to.model);
  tune->add_option("--split", to.split, "clips to tune on: train, test or all")
      ->check(CLI::IsMember({"train", "test", "all"}))
      ->capture_default_str();
  tune->add_option("--grid", to.grid_str, "candidate thresholds: lo:hi:step or comma list");
  tune->add_option("--theta-max", to.theta_max, "localization tolerance (degrees)")
      ->capture_default_str();
  tune->add_option("--gap-frames", to.gap_frames, "merge gaps up to this many frames")
      ->capture_default_str();
  tune->add_option("--min-frames", to.min_frames, "drop events shorter than this many frames")
      ->capture_default_str();
  tune->add_option("--out", to.out, "output directory")->required();
  tune->add_flag("--quiet", to.quiet, "suppress stdout summary");

  EvalOpts eo;
  auto* eval = app.add_subcommand("eval", "score predictions against a corpus manifest");
  eval->add_option("--preds", eo.preds, "predicted events CSV")->required();
  eval->add_option("--manifest", eo.manifest, "corpus manifest CSV")->required();
  eval->add_option("--scene-preds", eo.scene_preds, "per-clip scene predictions CSV");
  eval->add_option("--split", eo.split, "manifest rows to score: train, test or all")
      ->check(CLI::IsMember({"train", "test", "all"}))
      ->capture_default_str();
  eval->add_option("--theta-max", eo.theta_max, "localization tolerance (degrees)")
      ->capture_default_str();
  eval->add_option("--out", eo.out, "output directory (report.csv)");
  eval->add_flag("--quiet", eo.quiet, "suppress stdout report");

  StreamOpts sto;
  auto* stream = app.add_subcommand("stream", "run the online pipeline over chunked audio");
  add_pipe_flags(stream, sto.pipe);
  stream->add_option("--in", sto.in_wav, "4-channel WAV to stream instead of synthetic noise");
  stream->add_option("--chunks", sto.chunks, "synthetic chunks to stream (count)")
      ->capture_default_str();
  stream->add_flag("--live-drop", sto.live_drop, "drop chunks when queues are full");
  stream->add_option("--gap-frames", sto.gap_frames, "merge gaps up to this many frames")
      ->capture_default_str();
  stream->add_option("--min-frames", sto.min_frames, "drop events shorter than this many frames")
      ->capture_default_str();
  stream->add_option("--out", sto.out, "output directory (stream.csv)");
  stream->add_flag("--quiet", sto.quiet, "suppress stdout lines");

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "measure per-stage pipeline latency");
  add_pipe_flags(bench, bo.pipe);
  bench->add_option("--chunks", bo.chunks, "chunks to push through (count)")
      ->capture_default_str();
  bench->add_option("--out", bo.out, "output directory (benchmark.csv)");
  bench->add_flag("--quiet", bo.quiet, "suppress stdout report");

  ComplexityOpts co;
  auto* cx = app.add_subcommand("complexity", "report parameter and MAC counts for a network");
  cx->add_option("--spec", co.spec, "network config file (layer stack)")->required();
  cx->add_option("--out", co.out, "output directory (complexity.csv)");
  cx->add_flag("--quiet", co.quiet, "suppress stdout report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error,usage,%s\n", one_line(e.what()).c_str());
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(so);
    if (features->parsed()) return run_features(fo);
    if (infer->parsed()) return run_infer(io);
    if (dec->parsed()) return run_decode(dop);
    if (tune->parsed()) return run_tune(to);
    if (eval->parsed()) return run_eval(eo);
    if (stream->parsed()) return run_stream(sto);
    if (bench->parsed()) return run_bench(bo);
    if (cx->parsed()) return run_complexity(co);
  } catch (const Error& e) {
    std::fprintf(stderr, "error,%s,%s\n", errc_name(e.code()), one_line(e.what()).c_str());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error,internal,%s\n", one_line(e.what()).c_str());
    return 1;
  }
  return 2;
}
