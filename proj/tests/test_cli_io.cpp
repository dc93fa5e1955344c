// odo/tests/test_cli_io.cpp

// Copyright 2026  The odo authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "odo/bundle.hpp"
#include "odo/config.hpp"
#include "odo/error.hpp"
#include "odo/io.hpp"
#include "odo/pipeline.hpp"
#include "odo/scene.hpp"
#include "odo/wav.hpp"
#include "oracles.hpp"

using namespace odo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "odo_cli_io_test";
  fs::create_directories(dir);
  return dir;
}

SceneConfig small_scene(std::uint64_t seed) {
  SceneConfig cfg;
  cfg.duration_seconds = 40.0;
  cfg.sample_rate = 32000;
  cfg.seed = seed;
  return cfg;
}

TrainConfig small_training() {
  TrainConfig cfg;
  cfg.forest.n_trees = 4;
  cfg.front_end.detector_pool = 8;
  cfg.front_end.hmm_pool = 16;
  cfg.negative_ratio = 10.0;
  cfg.hmm.n_components = 3;
  cfg.hmm.max_frames_per_state = 1000;
  cfg.seed = 5;
  return cfg;
}

const LabeledScene &train_scene() {
  static const LabeledScene s = generate_scene(small_scene(1));
  return s;
}

const LabeledScene &test_scene() {
  static const LabeledScene s = generate_scene(small_scene(2));
  return s;
}

const ModelBundle &trained() {
  static const ModelBundle b = [] {
    testing::WarningCapture w;
    return train_bundle(std::span(&train_scene(), 1), small_training());
  }();
  return b;
}

}  // namespace

TEST_CASE("wav round trip") {
  const auto dir = scratch_dir();
  AudioClip clip;
  clip.sample_rate = 22050;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int i = 0; i < 1000; ++i) clip.samples.push_back(u(rng));
  write_wav((dir / "f.wav").string(), clip);
  const auto f = read_wav((dir / "f.wav").string());
  CHECK(f.sample_rate == 22050);
  CHECK(f.samples == clip.samples);
  write_wav((dir / "i.wav").string(), clip, WavFormat::pcm16);
  const auto p = read_wav((dir / "i.wav").string());
  REQUIRE(p.samples.size() == clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    CHECK(std::abs(p.samples[i] - clip.samples[i]) <= 1.0f / 32767);
  CHECK_THROWS_AS(read_wav((dir / "missing.wav").string()), Error);
}

TEST_CASE("multichannel wav is rejected") {
  const auto path = (scratch_dir() / "stereo.wav").string();
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char *>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char *>(&v), 2); };
  out.write("RIFF", 4);
  u32(36 + 8);
  out.write("WAVEfmt ", 8);
  u32(16);
  u16(1);
  u16(2);
  u32(8000);
  u32(8000 * 4);
  u16(4);
  u16(16);
  out.write("data", 4);
  u32(8);
  u32(0);
  u32(0);
  out.close();
  try {
    read_wav(path);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::format);
    CHECK(std::string(e.what()).find("mono") != std::string::npos);
  }
}

TEST_CASE("annotation round trip") {
  Transcript t;
  t.events = {{0.1 + 0.2, 1.0 / 3.0, 1.0}, {12.000000001, 0.05, 0.25}};
  const auto text = format_annotations(t, true);
  const auto back = parse_annotations(text);
  REQUIRE(back.size() == 2);
  CHECK(back.events[0].onset_seconds == t.events[0].onset_seconds);
  CHECK(back.events[0].duration_seconds == t.events[0].duration_seconds);
  CHECK(back.events[1].onset_seconds == t.events[1].onset_seconds);
  CHECK(back.events[1].confidence == 0.25);
  CHECK(format_annotations(Transcript{}) == "onset_seconds,duration_seconds\n");
  CHECK(parse_annotations("onset_seconds,duration_seconds\n").empty());
  CHECK_THROWS_AS(parse_annotations("onset,duration\n1,2\n"), Error);
  CHECK_THROWS_AS(parse_annotations("onset_seconds,duration_seconds\n1,-2\n"), Error);
  CHECK_THROWS_AS(parse_annotations("onset_seconds,duration_seconds\n1\n"), Error);
  CHECK_THROWS_AS(parse_annotations("onset_seconds,duration_seconds\nx,1\n"), Error);
}

TEST_CASE("settings") {
  Settings s = default_settings();
  CHECK(get_setting(s, "frame_len") == "2048");
  CHECK(get_setting(s, "hop") == "1024");
  CHECK(get_setting(s, "n_trees") == "20");
  CHECK(get_setting(s, "sharpener_window") == "11");
  CHECK(get_setting(s, "hmm_components") == "10");
  CHECK(get_setting(s, "count_window_seconds") == "10");
  apply_config_text(&s, "# comment\nn_trees = 7\n\nscene_noise = pink\n");
  CHECK(s.train.forest.n_trees == 7);
  CHECK(s.scene.noise_kind == NoiseKind::pink);
  CHECK_THROWS_AS(apply_config_text(&s, "no_such_key = 1\n"), Error);
  CHECK_THROWS_AS(apply_config_text(&s, "n_trees = many\n"), Error);
  CHECK_THROWS_AS(apply_config_text(&s, "n_trees\n"), Error);

  ::setenv("ODO_PRIOR_COMPONENTS", "2", 1);
  apply_env_overrides(&s);
  ::unsetenv("ODO_PRIOR_COMPONENTS");
  CHECK(s.train.prior_components == 2);

  set_setting(&s, "seed", "42");
  set_setting(&s, "threads", "1");
  resolve(&s);
  CHECK(s.train.seed == 42);
  CHECK(s.scene.seed == 42);
  CHECK(s.train.forest.threads == 1);
  for (const auto &key : setting_keys()) {
    Settings copy = s;
    set_setting(&copy, key, get_setting(s, key));
    CHECK(get_setting(copy, key) == get_setting(s, key));
  }
  CHECK(describe(s).find("n_trees = 7") != std::string::npos);
}

TEST_CASE("bundle round trip is bit exact") {
  const auto &b = trained();
  const auto text = serialize_bundle(b);
  const auto back = deserialize_bundle(text);
  CHECK(serialize_bundle(back) == text);
  const auto a1 = analyse(b, test_scene().audio);
  const auto a2 = analyse(back, test_scene().audio);
  CHECK((a1.onset.probs.array() == a2.onset.probs.array()).all());
  CHECK((a1.offset.probs.array() == a2.offset.probs.array()).all());
  for (System s : kAllSystems) {
    const auto w = count_windows(a1.duration_seconds, 10.0);
    if (s != System::combined && s != System::hmm) CHECK(count(b, a1, s, w) == count(back, a2, s, w));
    if (!transcribes(s)) continue;
    const auto t1 = format_annotations(detect(b, a1, s), true);
    const auto t2 = format_annotations(detect(back, a2, s), true);
    CHECK(t1 == t2);
  }
  const auto path = (scratch_dir() / "bundle.json").string();
  save_bundle(path, b);
  CHECK(serialize_bundle(load_bundle(path)) == text);
}

TEST_CASE("bundle version and consistency checks") {
  auto text = serialize_bundle(trained());
  const auto pos = text.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  auto bumped = text;
  bumped.replace(pos, 11, "\"version\":9");
  CHECK_THROWS_AS(deserialize_bundle(bumped), Error);
  CHECK_THROWS_AS(deserialize_bundle("{\"schema\": \"other\"}"), Error);
  CHECK_THROWS_AS(deserialize_bundle("not json"), Error);
}

TEST_CASE("training is deterministic") {
  testing::WarningCapture w;
  const auto again = train_bundle(std::span(&train_scene(), 1), small_training());
  CHECK(serialize_bundle(again) == serialize_bundle(trained()));
}

TEST_CASE("flat prior flag") {
  testing::WarningCapture w;
  TrainConfig cfg = small_training();
  cfg.flat_prior = true;
  cfg.train_hmm = false;
  TrainSummary summary;
  const auto b = train_bundle(std::span(&train_scene(), 1), cfg, &summary);
  CHECK(b.prior.kind == PriorKind::flat);
  CHECK_FALSE(b.hmm);
  CHECK(summary.n_events == Index(train_scene().truth.size()));
  CHECK(deserialize_bundle(serialize_bundle(b)).prior.kind == PriorKind::flat);
}

TEST_CASE("K reports the training polyphony") {
  const auto &b = trained();
  REQUIRE(b.hmm);
  const double hop = b.config.front_end.hop / double(b.sample_rate);
  const Index n = Index(analyse(b, train_scene().audio).onset.size());
  CHECK(b.hmm->k_max == derive_cardinality(train_scene().truth, n, hop).max());
  CHECK(b.combined->n_states() == 4 * (b.hmm->k_max + 1));
}

TEST_CASE("detection equals extraction on the library posterior") {
  const auto &b = trained();
  const auto a = analyse(b, test_scene().audio);
  const auto post = build_posterior(a.onset, a.offset, b.prior);
  CHECK(format_annotations(detect(b, a, System::odo), true) ==
        format_annotations(extract_transcript(post, b.threshold), true));
  const auto windows = count_windows(a.duration_seconds, 10.0);
  const auto counts = count(b, a, System::odo, windows);
  double sum = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    CHECK(counts[i] == expected_count(post, windows[i].start_seconds, windows[i].end_seconds,
                                      b.calibration[System::odo]));
    sum += counts[i];
  }
  const std::vector<CountWindow> whole{{0.0, a.duration_seconds}};
  for (System s : kAllSystems) {
    const auto parts = count(b, a, s, windows);
    double total = 0.0;
    for (double c : parts) total += c;
    CHECK(total == doctest::Approx(count(b, a, s, whole)[0]).epsilon(1e-12));
  }
  CHECK(sum > 0.0);
}

TEST_CASE("silence") {
  const auto &b = trained();
  AudioClip zero{std::vector<float>(32000 * 20, 0.0f), 32000};
  const auto a = analyse(b, zero);
  const auto windows = count_windows(20.0, 10.0);
  for (System s : kAllSystems) CHECK(count(b, a, s, windows) == std::vector<double>{0.0, 0.0});
  CHECK(detect(b, a, System::odo).empty());
}

TEST_CASE("stage mismatches are named") {
  auto b = trained();
  AudioClip clip = test_scene().audio;
  clip.sample_rate = 16000;
  CHECK_THROWS_AS(analyse(b, clip), Error);
  b.config.front_end.detector_pool = 4;
  try {
    analyse(b, test_scene().audio);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::dimension_mismatch);
    CHECK(std::string(e.what()).find("onset detector") != std::string::npos);
  }
}

TEST_CASE("debug dumps") {
  const auto &b = trained();
  const auto a = analyse(b, test_scene().audio);
  const auto dir = scratch_dir();
  write_posterior_csv((dir / "post.csv").string(), posterior(b, a));
  write_spectrogram_csv((dir / "spec.csv").string(), a.front_end->spectrogram);
  const auto post = read_text((dir / "post.csv").string());
  CHECK(post.rfind("onset_seconds,tau_", 0) == 0);
  const auto spec = read_text((dir / "spec.csv").string());
  CHECK(spec.rfind("hop_seconds=", 0) == 0);
  const std::vector<CountWindow> w{{0, 10}, {10, 15}};
  const std::vector<double> c{1.5, 2};
  CHECK(format_counts(w, c) == "start_seconds,end_seconds,count\n0,10,1.5\n10,15,2\n");
  fs::remove_all(dir);
}
