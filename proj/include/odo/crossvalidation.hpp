// odo/crossvalidation.hpp

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

#ifndef ODO_CROSSVALIDATION_HPP_
#define ODO_CROSSVALIDATION_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odo/metrics.hpp"
#include "odo/pipeline.hpp"
#include "odo/scene.hpp"

namespace odo {

/// Density conditions of the experiment grid.
enum class Condition { matched, train_dense, test_dense };

inline constexpr Condition kAllConditions[] = {
    Condition::matched, Condition::train_dense, Condition::test_dense};

std::string_view condition_name(Condition c);
Condition parse_condition(std::string_view name);

/// One recording session at natural density and folded to higher density.
struct Session {
  LabeledScene matched;
  LabeledScene dense;
};

/// `n_sessions` sessions, each made from `fold` independent scenes drawn
/// from `base` with derived seeds. The matched recording is the first scene
/// and the dense one the fold of all of them (see fold_scene for `fold_peak`).
std::vector<Session> synth_sessions(const SceneConfig &base, Index n_sessions = 2,
                                    Index fold = 3, double fold_peak = 0.9);

struct SystemOutput {
  std::optional<Transcript> transcript;  // empty for counting-only systems
  std::vector<double> counts;            // one per window
};

/// Systems trained on one recording.
class TrainedSystems {
 public:
  virtual ~TrainedSystems() = default;
  virtual SystemOutput run(System system, const LabeledScene &test,
                           std::span<const CountWindow> windows) = 0;
};

using Trainer =
    std::function<std::unique_ptr<TrainedSystems>(const LabeledScene &train)>;

/// Trainer running the full pipeline. Front ends are computed once per
/// recording and shared between conditions.
Trainer pipeline_trainer(const TrainConfig &cfg);

struct CvRow {
  System system = System::odo;
  Condition condition = Condition::matched;
  int fold = 0;
  std::string metric;  // precision, recall, f_measure, rms_count_error
  double value = 0.0;
};

struct CvSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int n_folds = 0;
};

struct CvReport {
  std::vector<CvRow> rows;
  std::vector<std::string> failures;
  /// Mean over folds with the per-fold range; empty when nothing was recorded.
  std::optional<CvSummary> summary(System system, Condition condition,
                                   std::string_view metric) const;
};

struct CvOptions {
  MatchConfig match;
  double count_window_seconds = 10.0;
  /// Progress lines (fold, condition); may be empty.
  std::function<void(const std::string &)> log;
};

/// Fold k trains on session k and tests on session k+1 (cyclically). Per
/// condition, training and test recordings are the matched or dense versions.
/// A failing system is recorded in `failures` and the others still run.
CvReport crossvalidate(std::span<const Session> sessions, const Trainer &trainer,
                       std::span<const System> systems,
                       std::span<const Condition> conditions,
                       const CvOptions &options = {});

/// Columns system,condition,fold,metric,value.
void write_results_csv(const std::string &path, const CvReport &report);
CvReport read_results_csv(const std::string &path);

/// Mean-over-folds table, one line per (system, condition).
std::string format_summary(const CvReport &report);

/// Grouped bars (conditions x systems) with fold-range error bars.
void write_svg_plot(const std::string &path, const CvReport &report,
                    std::string_view metric);

}  // namespace odo

#endif  // ODO_CROSSVALIDATION_HPP_
