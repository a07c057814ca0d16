// Copyright (C) 2026 the seld-edge authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "seldedge/synth.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "seldedge/sources.hpp"

using namespace seldedge;

TEST_CASE("snr gain solves the definition", "[synth]") {
  CHECK(gain_for_snr(1.0, 1.0, 0.0) == Catch::Approx(1.0));
  CHECK(gain_for_snr(1.0, 1.0, 20.0) == Catch::Approx(10.0));
  CHECK(gain_for_snr(1.0, 1.0, -20.0) == Catch::Approx(0.1));
  CHECK(gain_for_snr(2.0, 1.0, 0.0) == Catch::Approx(0.5));
  CHECK(gain_for_snr(0.5, 2.0, 6.0) == Catch::Approx(4.0 * std::pow(10.0, 0.3)));
  CHECK_THROWS_AS(gain_for_snr(0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(gain_for_snr(1.0, 0.0, 0.0), Error);
}

TEST_CASE("spatializing through a unit impulse reproduces the event", "[synth]") {
  Rng r(21);
  AudioClip event = AudioClip::zeros(1, 500, 24000);
  for (float& s : event.samples) s = static_cast<float>(r.uniform(-1.0, 1.0));

  Rir rir;
  rir.sample_rate = 24000;
  rir.ch.assign(4, std::vector<double>(64, 0.0));
  for (int m = 0; m < 4; ++m) rir.ch[static_cast<std::size_t>(m)][0] = 1.0;

  AudioClip out = spatialize(event, rir);
  REQUIRE(out.channels == 4);
  REQUIRE(out.length == event.length);
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < out.length; ++i)
      CHECK(out.at(m, i) == Catch::Approx(event.at(0, i)).margin(1e-6));
}

TEST_CASE("spatializing through a delayed scaled impulse shifts and scales", "[synth]") {
  Rng r(22);
  AudioClip event = AudioClip::zeros(1, 400, 24000);
  for (float& s : event.samples) s = static_cast<float>(r.uniform(-1.0, 1.0));

  Rir rir;
  rir.sample_rate = 24000;
  rir.ch.assign(4, std::vector<double>(64, 0.0));
  const int delay[4] = {0, 3, 7, 11};
  for (int m = 0; m < 4; ++m) rir.ch[static_cast<std::size_t>(m)][delay[m]] = 0.5;

  AudioClip out = spatialize(event, rir);
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < out.length; ++i) {
      const double want = i >= delay[m] ? 0.5 * event.at(0, i - delay[m]) : 0.0;
      CHECK(out.at(m, i) == Catch::Approx(want).margin(1e-6));
    }
}

TEST_CASE("procedural sources produce sane audio", "[synth]") {
  Rng r(23);
  for (int c = 0; c < kNumClasses; ++c) {
    AudioClip e = make_event(static_cast<EventClassId>(c), 0.5, 24000, r);
    CHECK(e.channels == 1);
    CHECK(e.length == 12000);
    CHECK(peak_abs(e) > 0.1f);
    CHECK(peak_abs(e) <= 1.0f);
  }
  for (int s = 0; s < kNumScenes; ++s) {
    AudioClip b = make_background(static_cast<SceneId>(s), 1.5, 24000, r);
    CHECK(b.channels == 1);
    CHECK(b.length == 36000);
    CHECK(peak_abs(b) > 0.01f);
    CHECK(peak_abs(b) <= 1.0f);
  }
}

namespace {

struct MixFixture {
  RirBank bank = RirBank::procedural(24000);
  AudioClip background;
  std::vector<std::pair<AudioClip, EventClassId>> events;
  SceneEventPolicy policy = SceneEventPolicy::standard();

  MixFixture() {
    Rng r(24);
    background = make_background(SceneId::Indoor, 1.5, 24000, r);
    events.emplace_back(make_event(EventClassId::Dog, 0.5, 24000, r), EventClassId::Dog);
    events.emplace_back(make_event(EventClassId::Crying, 0.4, 24000, r), EventClassId::Crying);
  }
};

}  // namespace

TEST_CASE("clip synthesis is deterministic in the seed", "[synth]") {
  MixFixture fx;
  ClipStems a = synthesize_clip(fx.background, fx.events, SceneId::Indoor, fx.policy, fx.bank, 99);
  ClipStems b = synthesize_clip(fx.background, fx.events, SceneId::Indoor, fx.policy, fx.bank, 99);
  ClipStems c = synthesize_clip(fx.background, fx.events, SceneId::Indoor, fx.policy, fx.bank, 100);
  CHECK(a.mixture.samples == b.mixture.samples);
  CHECK(a.labels.size() == b.labels.size());
  bool differs = a.mixture.samples != c.mixture.samples;
  CHECK(differs);
}

TEST_CASE("the mixture is peak-normalized and superposed from stems", "[synth]") {
  MixFixture fx;
  ClipStems s = synthesize_clip(fx.background, fx.events, SceneId::Indoor, fx.policy, fx.bank, 7);
  CHECK(s.mixture.channels == 4);
  CHECK(s.mixture.length == 24000);
  CHECK(peak_abs(s.mixture) == Catch::Approx(0.99).margin(1e-5));

  REQUIRE(s.background_stem.samples.size() == s.mixture.samples.size());
  for (const AudioClip& stem : s.event_stems)
    REQUIRE(stem.samples.size() == s.mixture.samples.size());
  for (std::size_t i = 0; i < s.mixture.samples.size(); ++i) {
    double sum = s.background_stem.samples[i];
    for (const AudioClip& stem : s.event_stems) sum += stem.samples[i];
    CHECK(s.mixture.samples[i] == Catch::Approx(sum).margin(2e-5));
  }
}

TEST_CASE("labels respect the scene policy and the azimuth grid", "[synth]") {
  MixFixture fx;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ClipStems s =
        synthesize_clip(fx.background, fx.events, SceneId::Indoor, fx.policy, fx.bank, seed);
    REQUIRE(s.labels.size() == 2);
    for (const SpatialEventLabel& l : s.labels) {
      CHECK(l.azimuth_deg % 15 == 0);
      CHECK(l.azimuth_deg >= 0);
      CHECK(l.azimuth_deg < 360);
      CHECK(l.snr_db >= 5.0);   // quiet-interior range
      CHECK(l.snr_db <= 20.0);
      CHECK(l.onset_s >= 0.0);
      CHECK(l.offset_s <= 1.0 + 1e-9);
      CHECK(l.offset_s > l.onset_s);
    }
  }
}

TEST_CASE("measured stem ratio reproduces the labeled snr", "[synth]") {
  MixFixture fx;
  ClipStems s = synthesize_clip(fx.background, fx.events, SceneId::Indoor, fx.policy, fx.bank, 55);
  REQUIRE(s.labels.size() == s.event_stems.size());
  for (std::size_t k = 0; k < s.labels.size(); ++k) {
    const SpatialEventLabel& l = s.labels[k];
    const int on = static_cast<int>(std::lround(l.onset_s * 24000));
    const int off = static_cast<int>(std::lround(l.offset_s * 24000));
    const double ev = rms_all_channels(s.event_stems[k], on, off);
    const double bg = rms_all_channels(s.background_stem, on, off);
    const double measured = 20.0 * std::log10(ev / bg);
    CHECK(measured == Catch::Approx(l.snr_db).margin(0.01));
  }
}

TEST_CASE("scene policy violations are rejected", "[synth]") {
  MixFixture fx;
  // Dog belongs to quiet-interior and open-air scenes, not the street scene.
  CHECK_THROWS_AS(
      synthesize_clip(fx.background, fx.events, SceneId::Urban, fx.policy, fx.bank, 1), Error);
  // duplicate classes in one clip
  std::vector<std::pair<AudioClip, EventClassId>> dup;
  dup.emplace_back(fx.events[0].first, EventClassId::Dog);
  dup.emplace_back(fx.events[0].first, EventClassId::Dog);
  CHECK_THROWS_AS(synthesize_clip(fx.background, dup, SceneId::Indoor, fx.policy, fx.bank, 1),
                  Error);
}

TEST_CASE("scene policy table matches the deployment matrix", "[synth]") {
  const SceneEventPolicy p = SceneEventPolicy::standard();
  auto allows = [&](SceneId s, EventClassId c) { return p.permits(s, c); };
  CHECK(allows(SceneId::Indoor, EventClassId::Crying));
  CHECK(allows(SceneId::Indoor, EventClassId::Dog));
  CHECK(allows(SceneId::Indoor, EventClassId::DoorKnock));
  CHECK_FALSE(allows(SceneId::Indoor, EventClassId::Siren));
  CHECK(allows(SceneId::Nature, EventClassId::Bicycle));
  CHECK(allows(SceneId::Nature, EventClassId::Dog));
  CHECK_FALSE(allows(SceneId::Nature, EventClassId::CarHorn));
  CHECK(allows(SceneId::Urban, EventClassId::Bicycle));
  CHECK(allows(SceneId::Urban, EventClassId::CarHorn));
  CHECK(allows(SceneId::Urban, EventClassId::Siren));
  CHECK_FALSE(allows(SceneId::Urban, EventClassId::Dog));
  CHECK(p.row(SceneId::Indoor).snr_lo_db == 5.0);
  CHECK(p.row(SceneId::Indoor).snr_hi_db == 20.0);
  CHECK(p.row(SceneId::Nature).snr_lo_db == 0.0);
  CHECK(p.row(SceneId::Nature).snr_hi_db == 15.0);
  CHECK(p.row(SceneId::Urban).snr_lo_db == -10.0);
  CHECK(p.row(SceneId::Urban).snr_hi_db == 5.0);
}

TEST_CASE("impulse response bank covers the azimuth grid", "[synth]") {
  const RirBank bank = RirBank::procedural(24000);
  CHECK(bank.sample_rate() == 24000);
  for (int k = 0; k < kNumAzimuths; ++k) {
    const Rir& rir = bank.at_index(k);
    CHECK(rir.sample_rate == 24000);
    REQUIRE(rir.ch.size() == 4);
    double energy = 0.0;
    for (const auto& c : rir.ch)
      for (double v : c) energy += v * v;
    CHECK(energy > 0.0);
  }
  CHECK(&bank.at_azimuth(30) == &bank.at_index(2));
  CHECK(&bank.at_azimuth(345) == &bank.at_index(23));
  CHECK(&bank.at_azimuth(360 + 30) == &bank.at_index(2));
  CHECK_THROWS_AS(bank.at_azimuth(31), Error);
}

TEST_CASE("different azimuths produce different inter-channel structure", "[synth]") {
  const RirBank bank = RirBank::procedural(24000);
  Rng r(25);
  AudioClip event = AudioClip::zeros(1, 2000, 24000);
  for (float& s : event.samples) s = static_cast<float>(r.uniform(-0.5, 0.5));
  AudioClip a = spatialize(event, bank.at_azimuth(0));
  AudioClip b = spatialize(event, bank.at_azimuth(90));
  double diff = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    diff += std::fabs(a.samples[i] - b.samples[i]);
  CHECK(diff > 1.0);
}
