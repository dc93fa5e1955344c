// odo/metrics.hpp

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

#ifndef ODO_METRICS_HPP_
#define ODO_METRICS_HPP_

#include <span>
#include <vector>

#include "odo/transcript.hpp"

namespace odo {

/// An estimate matches a true event when the onsets differ by at most
/// onset_tolerance_seconds and the durations by at most
/// duration_ratio_tolerance times the true duration.
struct MatchConfig {
  double onset_tolerance_seconds = 0.025;
  double duration_ratio_tolerance = 0.5;
};

struct MatchPair {
  std::size_t estimated = 0;
  std::size_t truth = 0;
};

bool admissible(const Event &estimated, const Event &truth,
                const MatchConfig &cfg);

/// Maximum-cardinality one-to-one matching of the admissibility graph;
/// among maximum matchings, the one with the least total onset deviation.
/// Indices refer to the events as stored in the two transcripts.
std::vector<MatchPair> match_events(const Transcript &estimated,
                                    const Transcript &truth,
                                    const MatchConfig &cfg = {});

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

PrfScore f_measure(std::size_t n_matched, std::size_t n_estimated,
                   std::size_t n_truth);

PrfScore score_transcript(const Transcript &estimated, const Transcript &truth,
                          const MatchConfig &cfg = {});

/// sqrt(mean((e - t)^2)).
double rms_count_error(std::span<const double> estimates,
                       std::span<const double> truths);

struct CountWindow {
  double start_seconds = 0.0;
  double end_seconds = 0.0;
};

/// Consecutive non-overlapping windows covering [0, total); the final
/// partial window is kept.
std::vector<CountWindow> count_windows(double total_seconds,
                                       double window_seconds);

/// Events whose onset lies in each half-open window.
std::vector<double> count_onsets(const Transcript &transcript,
                                 std::span<const CountWindow> windows);

}  // namespace odo

#endif  // ODO_METRICS_HPP_
