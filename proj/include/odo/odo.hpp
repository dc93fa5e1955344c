// odo/odo.hpp

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

#ifndef ODO_ODO_HPP_
#define ODO_ODO_HPP_

#include <span>
#include <vector>

#include "odo/detectors.hpp"
#include "odo/duration_prior.hpp"
#include "odo/metrics.hpp"
#include "odo/transcript.hpp"

namespace odo {

/// Per-(onset frame, duration) event probabilities. Each cell is an
/// independent Bernoulli probability, so the matrix does not sum to one; its
/// sum is an expected event count.
struct EventPosterior {
  Eigen::MatrixXd values;  // n_frames x (tau_max - tau_min + 1)
  Index tau_min = 1;
  Index tau_max = 1;
  double hop_seconds = 0.0;

  Index n_frames() const { return values.rows(); }
  Index n_taus() const { return values.cols(); }
  double at(Index onset_frame, Index tau) const {
    return values(onset_frame, tau - tau_min);
  }
};

struct CalibrationFactor {
  double factor = 1.0;
};

/// values[t][tau] = on[t] * off[t + tau] * p_dur(tau); zero when the offset
/// falls past the last frame.
EventPosterior build_posterior(const DetectionCurve &on,
                               const DetectionCurve &off,
                               const DurationPrior &prior);

struct Candidate {
  Index onset_frame = 0;
  Index tau = 0;
  double value = 0.0;
};

/// Non-zero cells that dominate both their onset row and their offset
/// anti-diagonal. Ties go to the smaller duration. Sorted by onset, then tau.
std::vector<Candidate> dominant_candidates(const EventPosterior &post);

Transcript candidates_to_transcript(std::span<const Candidate> candidates,
                                    double hop_seconds, double threshold);

/// Dominant cells with value > threshold, as events at frame midpoints.
Transcript extract_transcript(const EventPosterior &post, double threshold);

/// Threshold maximising the pooled transcription F-measure over a grid of 0
/// and the distinct dominant-cell values (subsampled to at most
/// `max_grid`). Ties go to the larger threshold.
double select_threshold(std::span<const EventPosterior> posteriors,
                        std::span<const Transcript> truths,
                        const MatchConfig &cfg = {}, std::size_t max_grid = 200);

/// cal * sum of the cells whose onset frame midpoint lies in
/// [start_seconds, end_seconds). Row masses are accumulated on a 2^-40
/// fixed-point grid so that windows partitioning a recording add up exactly.
double expected_count(const EventPosterior &post, double start_seconds,
                      double end_seconds, CalibrationFactor cal = {});

std::vector<double> expected_counts(const EventPosterior &post,
                                    std::span<const CountWindow> windows,
                                    CalibrationFactor cal = {});

/// Ratio of totals, sum(truths) / sum(estimates).
CalibrationFactor fit_calibration(std::span<const double> estimates,
                                  std::span<const double> truths);

}  // namespace odo

#endif  // ODO_ODO_HPP_
