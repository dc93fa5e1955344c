// odo/hmm.hpp

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

#ifndef ODO_HMM_HPP_
#define ODO_HMM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "odo/detectors.hpp"
#include "odo/gmm.hpp"
#include "odo/odo.hpp"

namespace odo {

/// Number of events active in each frame.
struct CardinalitySequence {
  std::vector<int> counts;

  Index size() const { return static_cast<Index>(counts.size()); }
  int max() const;
};

/// counts[t] = #events with onset <= midpoint(t) < onset + duration.
CardinalitySequence derive_cardinality(const Transcript &truth, Index n_frames,
                                       double hop_seconds);

/// One training recording: per-frame observations, the true cardinalities
/// and, for the expanded state space, the edge flags.
struct HmmTrainingSequence {
  MatrixX<float> observations;
  CardinalitySequence cardinality;
  FrameLabels labels;
};

struct HmmOptions {
  bool expanded = false;
  Index n_components = 10;
  std::uint64_t seed = 0;
  double variance_floor = 1e-6;
  double tolerance = 1e-6;
  int max_iterations = 100;
  Index max_frames_per_state = 0;  // 0: use every frame
};

/// Hidden states are event counts 0..K, or in the expanded model
/// (count, onset flag, offset flag) encoded as 4 * count + 2 * onset + offset.
struct HmmModel {
  int k_max = 0;
  bool expanded = false;
  Index obs_dim = 0;
  Eigen::MatrixXd transitions;  // row-stochastic, S x S
  Eigen::VectorXd initial;      // frame-0 state frequencies
  std::vector<DiagGmm> state_gmms;
  /// False for expanded-model states never seen in training. Such states
  /// have no observation model and are never decoded.
  std::vector<bool> state_present;

  Index n_states() const { return static_cast<Index>(state_gmms.size()); }
  int cardinality(Index state) const {
    return expanded ? static_cast<int>(state / 4) : static_cast<int>(state);
  }
  static Index expanded_state(int count, bool onset, bool offset) {
    return 4 * Index(count) + 2 * Index(onset) + Index(offset);
  }
};

/// Empirical transitions with add-one smoothing over the transitions seen in
/// training (unseen ones stay at zero) and one diagonal GMM per state.
/// `em_traces`, when given, receives each state's EM log-likelihood trace.
HmmModel train_hmm(std::span<const HmmTrainingSequence> sequences,
                   const HmmOptions &options,
                   std::vector<std::vector<double>> *em_traces = nullptr);

/// Appends the onset and offset probabilities as two extra columns.
MatrixX<float> augment_observations(const MatrixX<float> &observations,
                                    const DetectionCurve &on,
                                    const DetectionCurve &off);

/// frames x states log p(x_t | state); -inf for absent states.
Eigen::MatrixXd emission_log_likelihoods(const HmmModel &model,
                                         const MatrixX<float> &observations);

struct StatePath {
  std::vector<int> states;
  double log_prob = 0.0;
};

/// Probabilities below this are treated as this when taking logs at decode.
inline constexpr double kTransitionFloor = 1e-12;

/// Log-domain Viterbi over precomputed emissions. Ties go to the lower state
/// index.
StatePath viterbi_decode(const Eigen::VectorXd &log_initial,
                         const Eigen::MatrixXd &log_transitions,
                         const Eigen::MatrixXd &log_emissions);

StatePath viterbi(const HmmModel &model, const MatrixX<float> &observations);

/// Joint log-probability of one specific path.
double path_log_prob(const Eigen::VectorXd &log_initial,
                     const Eigen::MatrixXd &log_transitions,
                     const Eigen::MatrixXd &log_emissions,
                     std::span<const int> path);

void decode_log_parameters(const HmmModel &model, Eigen::VectorXd *log_initial,
                           Eigen::MatrixXd *log_transitions);

enum class PairingOrder { fifo, lifo };

/// Rises emit onsets, falls emit offsets; onsets are closed in order of
/// occurrence (or most-recent-first with lifo). Events still open at the end
/// close after the final frame. Identical events are merged with a warning.
Transcript cardinality_to_transcript(const CardinalitySequence &cardinality,
                                     double hop_seconds,
                                     PairingOrder order = PairingOrder::fifo);

CardinalitySequence path_cardinality(const StatePath &path,
                                     const HmmModel &model);

Transcript states_to_transcript(const StatePath &path, const HmmModel &model,
                                double hop_seconds,
                                PairingOrder order = PairingOrder::fifo);

/// cal * number of events with onset in [start, end).
double hmm_count(const Transcript &transcript, double start_seconds,
                 double end_seconds, CalibrationFactor cal = {});

}  // namespace odo

#endif  // ODO_HMM_HPP_
