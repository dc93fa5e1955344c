// odo/tools/odo_cli.cpp

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

// Command-line front end: synth, train, detect, count, eval.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "odo/bundle.hpp"
#include "odo/config.hpp"
#include "odo/crossvalidation.hpp"
#include "odo/error.hpp"
#include "odo/io.hpp"
#include "odo/pipeline.hpp"
#include "odo/scene.hpp"
#include "odo/wav.hpp"

namespace fs = std::filesystem;
using namespace odo;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App *app, Common *c) {
  app->add_option("--config", c->config, "key = value configuration file");
  app->add_option("--set", c->sets, "override one key, as key=value (repeatable)");
  app->add_option("--seed", c->seed, "master seed for all randomness");
  app->add_option("--threads", c->threads, "worker threads (0: all cores)");
}

Settings settings_from(const Common &c) {
  Settings s = default_settings();
  if (!c.config.empty()) load_config_file(&s, c.config);
  apply_env_overrides(&s);
  for (const auto &kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_argument, "--set expects key=value, got '" + kv + "'");
    set_setting(&s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) s.seed = *c.seed;
  if (c.threads) s.threads = *c.threads;
  resolve(&s);
  return s;
}

std::string sibling_csv(const std::string &wav) {
  return fs::path(wav).replace_extension(".csv").string();
}

LabeledScene load_labeled(const std::string &wav, const std::string &csv) {
  LabeledScene scene;
  scene.audio = read_wav(wav);
  scene.truth = read_annotations(csv.empty() ? sibling_csv(wav) : csv);
  return scene;
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void write_file(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

// synth ----------------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string out_dir = ".";
  std::string name = "scene";
  int scenes = 1;
  bool dense = false;
  bool pcm16 = false;
};

void run_synth(const SynthArgs &a) {
  Settings s = settings_from(a.common);
  fs::create_directories(a.out_dir);
  std::vector<LabeledScene> made;
  std::string manifest = "# scene settings\n";
  for (const auto &key : setting_keys())
    if (key.rfind("scene_", 0) == 0 || key == "seed")
      manifest += key + " = " + get_setting(s, key) + "\n";
  manifest += "# files\n";
  auto emit = [&](const LabeledScene &scene, const std::string &stem) {
    const std::string base = (fs::path(a.out_dir) / stem).string();
    write_wav(base + ".wav", scene.audio, a.pcm16 ? WavFormat::pcm16 : WavFormat::float32);
    write_annotations(base + ".csv", scene.truth);
    manifest += stem + ".wav events=" + std::to_string(scene.truth.size()) + "\n";
  };
  for (int i = 0; i < a.scenes; ++i) {
    SceneConfig cfg = s.scene;
    cfg.seed = s.seed + std::uint64_t(i);
    made.push_back(generate_scene(cfg));
    char stem[256];
    if (a.scenes == 1)
      std::snprintf(stem, sizeof stem, "%s", a.name.c_str());
    else
      std::snprintf(stem, sizeof stem, "%s_%03d", a.name.c_str(), i);
    emit(made.back(), stem);
    manifest += "  seed=" + std::to_string(cfg.seed) + "\n";
  }
  if (a.dense) emit(fold_scene(made, s.fold_peak), a.name + "_dense");
  write_text((fs::path(a.out_dir) / (a.name + ".manifest.txt")).string(), manifest);
  std::cout << "wrote " << made.size() << " scene(s) to " << a.out_dir << "\n";
}

// train ----------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::vector<std::string> audio;
  std::vector<std::string> annotations;
  std::string out = "bundle.json";
  bool flat_prior = false;
  bool no_hmm = false;
};

void run_train(const TrainArgs &a) {
  Settings s = settings_from(a.common);
  if (a.flat_prior) s.train.flat_prior = true;
  if (a.no_hmm) s.train.train_hmm = false;
  if (!a.annotations.empty() && a.annotations.size() != a.audio.size())
    throw Error(Errc::invalid_argument, "give one --annotations file per --audio file");
  std::vector<LabeledScene> scenes;
  for (std::size_t i = 0; i < a.audio.size(); ++i)
    scenes.push_back(load_labeled(a.audio[i], a.annotations.empty() ? "" : a.annotations[i]));
  TrainSummary summary;
  const ModelBundle bundle = train_bundle(scenes, s.train, &summary);
  save_bundle(a.out, bundle);
  std::printf("recordings %ld\nevents %ld\nframes %ld\n", long(summary.n_recordings),
              long(summary.n_events), long(summary.n_frames));
  std::printf("prior %s\n", bundle.prior.kind == PriorKind::gmm ? "gmm" : "flat");
  std::printf("threshold %.9g\nflat_threshold %.9g\n", bundle.threshold,
              bundle.flat_threshold);
  if (bundle.hmm) std::printf("K %d\n", summary.k_max);
  for (System sys : kAllSystems)
    std::printf("calibration_%s %.9g\n", std::string(system_name(sys)).c_str(),
                bundle.calibration[sys].factor);
  std::printf("bundle %s\n", a.out.c_str());
}

// detect / count -------------------------------------------------------------

struct DetectArgs {
  Common common;
  std::string bundle, audio, out = "-", system = "odo";
  std::string posterior_csv, spectrogram_csv;
};

void run_detect(const DetectArgs &a) {
  settings_from(a.common);  // validates overrides
  const ModelBundle bundle = load_bundle(a.bundle);
  const System system = parse_system(a.system);
  const Analysis analysis = analyse(bundle, read_wav(a.audio));
  if (!a.spectrogram_csv.empty())
    write_spectrogram_csv(a.spectrogram_csv, analysis.front_end->spectrogram);
  if (!a.posterior_csv.empty())
    write_posterior_csv(a.posterior_csv, posterior(bundle, analysis,
                                                   system == System::odo_flat));
  const Transcript tr = detect(bundle, analysis, system);
  write_file(a.out, format_annotations(tr, true));
}

struct CountArgs {
  Common common;
  std::string bundle, audio, out = "-", system = "odo";
  std::optional<double> window_seconds;
};

void run_count(const CountArgs &a) {
  settings_from(a.common);
  const ModelBundle bundle = load_bundle(a.bundle);
  const System system = parse_system(a.system);
  const AudioClip clip = read_wav(a.audio);
  const Analysis analysis = analyse(bundle, clip);
  const double w = a.window_seconds.value_or(bundle.config.count_window_seconds);
  const auto windows = count_windows(clip.duration_seconds(), w);
  const auto counts = count(bundle, analysis, system, windows);
  write_file(a.out, format_counts(windows, counts));
}

// eval -----------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::vector<std::string> sessions;
  std::string conditions = "matched,train_dense,test_dense";
  std::string systems = "odo,odo_flat,hmm,combined,raw_onset";
  std::string out = "results.csv";
  std::string plots;
  bool quiet = false;
};

void run_eval(const EvalArgs &a) {
  Settings s = settings_from(a.common);
  std::vector<Session> sessions;
  if (a.sessions.empty()) {
    sessions = synth_sessions(s.scene, s.n_sessions, s.fold_factor, s.fold_peak);
  } else {
    for (const auto &spec : a.sessions) {
      std::vector<LabeledScene> parts;
      for (const auto &wav : split_list(spec)) parts.push_back(load_labeled(wav, ""));
      if (parts.empty()) throw Error(Errc::invalid_argument, "empty --session");
      Session session;
      session.dense = fold_scene(parts, s.fold_peak);
      session.matched = std::move(parts.front());
      sessions.push_back(std::move(session));
    }
  }
  std::vector<Condition> conds;
  for (const auto &c : split_list(a.conditions)) conds.push_back(parse_condition(c));
  std::vector<System> systems;
  for (const auto &n : split_list(a.systems)) systems.push_back(parse_system(n));
  CvOptions opts;
  opts.match = s.train.match;
  opts.count_window_seconds = s.train.count_window_seconds;
  if (!a.quiet) opts.log = [](const std::string &m) { std::cerr << m << "\n"; };
  const CvReport report =
      crossvalidate(sessions, pipeline_trainer(s.train), systems, conds, opts);
  write_results_csv(a.out, report);
  if (!a.plots.empty()) {
    fs::create_directories(a.plots);
    write_svg_plot((fs::path(a.plots) / "f_measure.svg").string(), report, "f_measure");
    write_svg_plot((fs::path(a.plots) / "rms_count_error.svg").string(), report,
                   "rms_count_error");
  }
  std::cout << format_summary(report);
  for (const auto &f : report.failures) std::cerr << "warning: " << f << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"odo: polyphonic acoustic event detection and counting"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto *c_synth = app.add_subcommand("synth", "generate labelled synthetic scenes");
  add_common(c_synth, &synth.common);
  c_synth->add_option("--out", synth.out_dir, "output directory");
  c_synth->add_option("--name", synth.name, "file stem");
  c_synth->add_option("--scenes", synth.scenes, "number of scenes (seeds seed, seed+1, ...)")
      ->check(CLI::PositiveNumber);
  c_synth->add_flag("--dense", synth.dense, "also write the fold of all scenes");
  c_synth->add_flag("--pcm16", synth.pcm16, "write 16-bit PCM instead of 32-bit float");

  TrainArgs train;
  auto *c_train = app.add_subcommand("train", "train every system into one bundle");
  add_common(c_train, &train.common);
  c_train->add_option("--audio", train.audio, "training WAV (repeatable)")->required();
  c_train->add_option("--annotations", train.annotations,
                      "annotation CSV per WAV (default: WAV path with .csv)");
  c_train->add_option("--out", train.out, "bundle path");
  c_train->add_flag("--flat-prior", train.flat_prior, "use a flat duration prior");
  c_train->add_flag("--no-hmm", train.no_hmm, "skip the HMM systems");

  DetectArgs det;
  auto *c_detect = app.add_subcommand("detect", "write an event transcript");
  add_common(c_detect, &det.common);
  c_detect->add_option("--bundle", det.bundle)->required();
  c_detect->add_option("--audio", det.audio)->required();
  c_detect->add_option("--out", det.out, "annotation CSV ('-' for stdout)");
  c_detect->add_option("--system", det.system, "odo, odo_flat, hmm or combined");
  c_detect->add_option("--posterior-csv", det.posterior_csv, "also dump the event posterior");
  c_detect->add_option("--spectrogram-csv", det.spectrogram_csv,
                       "also dump the noise-reduced spectrogram");

  CountArgs cnt;
  auto *c_count = app.add_subcommand("count", "estimate event counts per window");
  add_common(c_count, &cnt.common);
  c_count->add_option("--bundle", cnt.bundle)->required();
  c_count->add_option("--audio", cnt.audio)->required();
  c_count->add_option("--out", cnt.out, "counts CSV ('-' for stdout)");
  c_count->add_option("--system", cnt.system, "odo, odo_flat, hmm, combined or raw_onset");
  c_count->add_option("--window-seconds", cnt.window_seconds, "count window length");

  EvalArgs ev;
  auto *c_eval = app.add_subcommand("eval", "two-fold crossvalidation over density conditions");
  add_common(c_eval, &ev.common);
  c_eval->add_option("--session", ev.sessions,
                     "comma-separated WAVs of one session; the first is the matched "
                     "recording, the fold of all is the dense one (repeatable; "
                     "default: synthesise from the scene settings)");
  c_eval->add_option("--conditions", ev.conditions, "comma-separated conditions");
  c_eval->add_option("--systems", ev.systems, "comma-separated systems");
  c_eval->add_option("--out", ev.out, "results CSV");
  c_eval->add_option("--plots", ev.plots, "directory for SVG plots");
  c_eval->add_flag("--quiet", ev.quiet, "no progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (*c_synth) run_synth(synth);
    if (*c_train) run_train(train);
    if (*c_detect) run_detect(det);
    if (*c_count) run_count(cnt);
    if (*c_eval) run_eval(ev);
  } catch (const Error &e) {
    std::fprintf(stderr, "error[%s]: %s\n", std::string(errc_name(e.code())).c_str(),
                 e.what());
    return 2;
  } catch (const fs::filesystem_error &e) {
    std::fprintf(stderr, "error[io]: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error[internal]: %s\n", e.what());
    return 3;
  }
  return 0;
}
