// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Online walkthrough: run the three-stage pipeline (acquisition, scene
// classification, localization + detection) over synthetic one-second
// chunks with scripted models, print each result as it lands, then show the
// per-stage latency breakdown next to the embedded-target baselines.

#include <cstdio>

#include "seldedge/seldedge.hpp"

using namespace seldedge;

int main() {
  StubScript seld_script;
  seld_script.behavior = StubBehavior::EnergyGate;
  seld_script.target_class = EventClassId::CarHorn;
  auto [seld_spec, seld_weights] = stub_model(seld_script);

  StubScript asc_script;
  asc_script.behavior = StubBehavior::ConstantScene;
  asc_script.scene = SceneId::Urban;
  auto [asc_spec, asc_weights] = stub_model(asc_script);

  PipelineConfig cfg;
  cfg.policy = ScenePolicy::LatestWins;
  Pipeline pipeline(cfg, Model(seld_spec, seld_weights), Model(asc_spec, asc_weights),
                    ThresholdMatrix::uniform(0.5));

  std::printf("index,scene,events,end_to_end_ms\n");
  const auto source = synthetic_chunk_source(8, /*seed=*/2026, cfg.sample_rate,
                                             cfg.chunk_samples());
  const RunSummary summary = pipeline.run(
      source, [](const StreamResult& r) { std::printf("%s\n", stream_line(r).c_str()); });
  std::printf("processed %zu of %zu chunks, %zu dropped\n", summary.processed,
              summary.submitted, summary.dropped);

  const BenchmarkReport report = benchmark_pipeline(pipeline, 40, /*seed=*/7);
  std::printf("\nlatency per stage (40 chunks):\n%s", report.csv().c_str());
  return 0;
}
