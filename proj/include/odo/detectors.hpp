// odo/detectors.hpp

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

#ifndef ODO_DETECTORS_HPP_
#define ODO_DETECTORS_HPP_

#include <span>

#include "odo/forest.hpp"
#include "odo/transcript.hpp"

namespace odo {

enum class EdgeKind { onset, offset };

/// Per-frame edge probabilities, p_on(t|y) or p_off(t|y).
struct DetectionCurve {
  Eigen::VectorXd probs;
  double hop_seconds = 0.0;
  EdgeKind kind = EdgeKind::onset;

  Index size() const { return probs.size(); }
};

/// Binary supervision: a frame is 1 when some event edge falls inside
/// [t*hop, (t+1)*hop). Coinciding edges collapse to a single 1.
struct FrameLabels {
  Eigen::VectorXd onset_flags;
  Eigen::VectorXd offset_flags;
};

FrameLabels labels_from_transcript(const Transcript &transcript, Index n_frames,
                                   double hop_seconds);

DetectionCurve predict_raw(const ForestModel &model,
                           const MatrixX<float> &patches, double hop_seconds,
                           EdgeKind kind);

/// Linear map from a centred window of raw detector outputs to a sharper
/// edge probability.
struct SharpenerModel {
  Eigen::VectorXd weights;  // length window_len, weights[h] is the centre
  double bias = 0.0;

  Index window_len() const { return weights.size(); }
  static SharpenerModel identity(Index window_len);
};

/// Least squares over every frame of every curve (windows zero-padded at the
/// curve ends). The minimum-norm solution is returned when the design is rank
/// deficient.
SharpenerModel train_sharpener(std::span<const DetectionCurve> raw,
                               std::span<const Eigen::VectorXd> labels,
                               Index window_len = 11);
SharpenerModel train_sharpener(const DetectionCurve &raw,
                               const Eigen::VectorXd &labels,
                               Index window_len = 11);

/// Un-clamped linear prediction.
Eigen::VectorXd sharpener_response(const SharpenerModel &model,
                                   const Eigen::VectorXd &raw);

/// Sum of squared residuals of the un-clamped prediction.
double sharpener_objective(const SharpenerModel &model,
                           const Eigen::VectorXd &raw,
                           const Eigen::VectorXd &labels);

/// Linear prediction clamped to [0, 1].
DetectionCurve sharpen(const SharpenerModel &model, const DetectionCurve &raw);

}  // namespace odo

#endif  // ODO_DETECTORS_HPP_
