// odo/tests/test_evaluation.cpp

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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <tuple>

#include "odo/crossvalidation.hpp"
#include "odo/error.hpp"
#include "odo/metrics.hpp"
#include "oracles.hpp"

using namespace odo;

namespace {

Transcript random_transcript(std::mt19937_64 &rng, int max_events) {
  std::uniform_int_distribution<int> n(0, max_events);
  std::uniform_real_distribution<double> on(0.0, 0.15), dur(0.05, 0.15);
  Transcript t;
  const int k = n(rng);
  for (int i = 0; i < k; ++i) t.events.push_back({on(rng), dur(rng), 1.0});
  t.sort();
  return t;
}

class StubSystems : public TrainedSystems {
 public:
  explicit StubSystems(bool fail_hmm) : fail_hmm_(fail_hmm) {}
  SystemOutput run(System system, const LabeledScene &test,
                   std::span<const CountWindow> windows) override {
    if (fail_hmm_ && system == System::hmm) throw Error(Errc::empty_state, "stub failure");
    SystemOutput out;
    if (transcribes(system)) out.transcript = test.truth;
    out.counts = count_onsets(test.truth, windows);
    return out;
  }

 private:
  bool fail_hmm_;
};

std::vector<Session> tiny_sessions(bool identical) {
  SceneConfig cfg;
  cfg.duration_seconds = 25.0;
  cfg.sample_rate = 8000;
  cfg.call_band_hi_hz = 3500.0;
  cfg.seed = 3;
  auto sessions = synth_sessions(cfg, 2, 3, 0.0);
  if (identical) sessions[1] = sessions[0];
  return sessions;
}

}  // namespace

TEST_CASE("admissibility") {
  Event truth{1.0, 0.1, 1.0};
  CHECK(admissible({1.02, 0.1, 1}, truth, {}));
  CHECK_FALSE(admissible({1.03, 0.1, 1}, truth, {}));
  CHECK(admissible({1.0, 0.149, 1}, truth, {}));
  CHECK_FALSE(admissible({1.0, 0.151, 1}, truth, {}));
  CHECK(admissible({1.0, 0.051, 1}, truth, {}));
  // Duration tolerance is relative to the true event, so swapping roles
  // changes the verdict.
  Event a{0.0, 0.1, 1}, b{0.0, 0.16, 1};
  CHECK_FALSE(admissible(b, a, {}));
  CHECK(admissible(a, b, {}));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  for (int i = 0; i < 500; ++i) {
    const Event e{u(rng), u(rng) + 0.01, 1}, g{u(rng), u(rng) + 0.01, 1};
    const bool want = std::abs(e.onset_seconds - g.onset_seconds) <= 0.025 &&
                      std::abs(e.duration_seconds - g.duration_seconds) <= 0.5 * g.duration_seconds;
    CHECK(admissible(e, g, {}) == want);
  }
}

TEST_CASE("matching equals exhaustive assignment") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    const auto est = random_transcript(rng, 6), truth = random_transcript(rng, 6);
    const auto m = match_events(est, truth);
    const auto want = testing::brute_force_matching(est, truth, {});
    CHECK(m.size() == want.size);
    double dev = 0.0;
    std::vector<bool> ue(est.size()), ut(truth.size());
    for (const auto &p : m) {
      CHECK(admissible(est.events[p.estimated], truth.events[p.truth], {}));
      CHECK_FALSE(ue[p.estimated]);
      CHECK_FALSE(ut[p.truth]);
      ue[p.estimated] = ut[p.truth] = true;
      dev += std::abs(est.events[p.estimated].onset_seconds - truth.events[p.truth].onset_seconds);
    }
    CHECK(dev == doctest::Approx(want.deviation).epsilon(1e-9));
    // Loosening tolerances never shrinks the matching.
    MatchConfig loose;
    loose.onset_tolerance_seconds = 0.05;
    loose.duration_ratio_tolerance = 0.8;
    CHECK(match_events(est, truth, loose).size() >= m.size());
  }
}

TEST_CASE("matching basics") {
  Transcript t;
  t.events = {{0.1, 0.1, 1}, {0.5, 0.2, 1}, {0.9, 0.1, 1}};
  CHECK(match_events(t, t).size() == 3);
  Transcript off = t;
  off.events[1].onset_seconds += 0.030;
  CHECK(match_events(off, t).size() == 2);
  // Order does not matter.
  Transcript shuffled = t;
  std::swap(shuffled.events[0], shuffled.events[2]);
  CHECK(score_transcript(shuffled, t).f_measure == 1.0);
}

TEST_CASE("F-measure arithmetic") {
  auto s = f_measure(5, 5, 5);
  CHECK(s.precision == 1.0);
  CHECK(s.f_measure == 1.0);
  s = f_measure(0, 3, 4);
  CHECK(s.f_measure == 0.0);
  s = f_measure(0, 0, 0);
  CHECK(s.f_measure == 0.0);
  s = f_measure(3, 4, 6);
  CHECK(s.precision == 0.75);
  CHECK(s.recall == 0.5);
  CHECK(s.f_measure == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("RMS count error") {
  const std::vector<double> a{1, 3}, b{2, 2};
  CHECK(rms_count_error(a, a) == 0.0);
  CHECK(rms_count_error(a, b) == 1.0);
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = testing::random_unit(rng, 13), y = testing::random_unit(rng, 13);
    std::vector<double> xv(x.data(), x.data() + 13), yv(y.data(), y.data() + 13);
    CHECK(std::abs(rms_count_error(xv, yv) - std::sqrt((x - y).squaredNorm() / 13)) <= 1e-12);
  }
  const std::vector<double> flat(6, 4.0), shifted(6, 6.5);
  CHECK(rms_count_error(shifted, flat) == 2.5);
  CHECK_THROWS_AS(rms_count_error(a, flat), Error);
  CHECK_THROWS_AS(rms_count_error(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST_CASE("count windows include the final partial window") {
  const auto w = count_windows(25.0, 10.0);
  REQUIRE(w.size() == 3);
  CHECK(w[2].start_seconds == 20.0);
  CHECK(w[2].end_seconds == 25.0);
  CHECK(count_windows(30.0, 10.0).size() == 3);
  Transcript t;
  t.events = {{0.0, 0.1, 1}, {9.99, 0.1, 1}, {10.0, 0.1, 1}, {24.9, 0.1, 1}};
  CHECK(count_onsets(t, w) == std::vector<double>{2, 1, 1});
}

TEST_CASE("crossvalidation with a perfect stub") {
  const auto sessions = tiny_sessions(true);
  const Trainer trainer = [](const LabeledScene &) { return std::make_unique<StubSystems>(false); };
  const auto report = crossvalidate(sessions, trainer, kAllSystems, kAllConditions);
  CHECK(report.failures.empty());
  std::size_t cells = 0;
  for (System s : kAllSystems)
    for (Condition c : kAllConditions) {
      const auto rms = report.summary(s, c, "rms_count_error");
      REQUIRE(rms);
      CHECK(rms->n_folds == 2);
      CHECK(rms->max == 0.0);
      cells += 2;
      const auto f = report.summary(s, c, "f_measure");
      if (transcribes(s)) {
        REQUIRE(f);
        CHECK(f->min == 1.0);
      } else {
        CHECK_FALSE(f);
      }
    }
  CHECK(cells == 30);
  std::set<std::tuple<int, int, int>> seen;
  for (const auto &r : report.rows) seen.insert({int(r.system), int(r.condition), r.fold});
  CHECK(seen.size() == 30);
}

TEST_CASE("per-system failures do not abort the grid") {
  const auto sessions = tiny_sessions(false);
  const Trainer trainer = [](const LabeledScene &) { return std::make_unique<StubSystems>(true); };
  const auto report = crossvalidate(sessions, trainer, kAllSystems, kAllConditions);
  CHECK(report.failures.size() == 6);
  CHECK_FALSE(report.summary(System::hmm, Condition::matched, "f_measure"));
  CHECK(report.summary(System::odo, Condition::test_dense, "f_measure")->mean == 1.0);

  const Trainer broken = [](const LabeledScene &) -> std::unique_ptr<TrainedSystems> {
    throw Error(Errc::degenerate_supervision, "cannot train");
  };
  const auto none = crossvalidate(sessions, broken, kAllSystems, kAllConditions);
  CHECK(none.rows.empty());
  CHECK(none.failures.size() == 30);
}

TEST_CASE("sessions fold to triple density") {
  const auto sessions = tiny_sessions(false);
  REQUIRE(sessions.size() == 2);
  for (const auto &s : sessions) {
    CHECK(s.dense.audio.samples.size() == s.matched.audio.samples.size());
    CHECK(s.dense.truth.size() > s.matched.truth.size());
  }
  CHECK(sessions[0].matched.audio.samples != sessions[1].matched.audio.samples);
  CHECK_THROWS_AS(crossvalidate(std::span(sessions.data(), 1),
                                [](const LabeledScene &) { return std::make_unique<StubSystems>(false); },
                                kAllSystems, kAllConditions),
                  Error);
}

TEST_CASE("results files") {
  CvReport r;
  r.rows.push_back({System::odo, Condition::matched, 0, "f_measure", 0.1 + 0.2});
  r.rows.push_back({System::odo, Condition::matched, 1, "f_measure", 0.5});
  r.rows.push_back({System::raw_onset, Condition::test_dense, 1, "rms_count_error", 2.25});
  const auto dir = std::filesystem::temp_directory_path() / "odo_eval_test";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "results.csv").string();
  write_results_csv(csv, r);
  const auto back = read_results_csv(csv);
  REQUIRE(back.rows.size() == 3);
  CHECK(back.rows[0].value == 0.1 + 0.2);
  CHECK(back.rows[2].system == System::raw_onset);
  CHECK(back.rows[2].condition == Condition::test_dense);
  const auto s = back.summary(System::odo, Condition::matched, "f_measure");
  REQUIRE(s);
  CHECK(s->mean == doctest::Approx(0.4));
  CHECK(s->min == 0.1 + 0.2);
  CHECK(s->max == 0.5);
  const auto svg = (dir / "f.svg").string();
  write_svg_plot(svg, r, "f_measure");
  std::ifstream in(svg);
  std::string head;
  std::getline(in, head);
  CHECK(head.find("<svg") != std::string::npos);
  CHECK(format_summary(r).find("odo") != std::string::npos);
  std::filesystem::remove_all(dir);
}
