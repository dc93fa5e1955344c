// odo/src/detectors.cpp

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

#include "odo/detectors.hpp"

#include <string>

#include <Eigen/QR>

#include "odo/error.hpp"

namespace odo {

FrameLabels labels_from_transcript(const Transcript &transcript, Index n_frames,
                                   double hop_seconds) {
  if (!(hop_seconds > 0.0))
    throw Error(Errc::invalid_argument, "hop must be positive");
  FrameLabels labels;
  labels.onset_flags = Eigen::VectorXd::Zero(n_frames);
  labels.offset_flags = Eigen::VectorXd::Zero(n_frames);
  for (const Event &e : transcript.events) {
    const Index on = frame_containing(e.onset_seconds, hop_seconds);
    const Index off = frame_containing(e.offset_seconds(), hop_seconds);
    if (on < 0 || off >= n_frames)
      throw Error(Errc::invalid_argument,
                  "event at " + std::to_string(e.onset_seconds) +
                      " s lies outside the " + std::to_string(n_frames) +
                      " analysed frames");
    labels.onset_flags[on] = 1.0;
    labels.offset_flags[off] = 1.0;
  }
  return labels;
}

DetectionCurve predict_raw(const ForestModel &model,
                           const MatrixX<float> &patches, double hop_seconds,
                           EdgeKind kind) {
  DetectionCurve curve;
  curve.probs = forest_predict(model, patches);
  curve.hop_seconds = hop_seconds;
  curve.kind = kind;
  return curve;
}

SharpenerModel SharpenerModel::identity(Index window_len) {
  SharpenerModel m;
  m.weights = Eigen::VectorXd::Zero(window_len);
  m.weights[window_len / 2] = 1.0;
  return m;
}

namespace {

void check_window(Index window_len) {
  if (window_len < 1 || window_len % 2 == 0)
    throw Error(Errc::invalid_argument,
                "sharpener window must be odd, got " + std::to_string(window_len));
}

// Row t: [1, raw[t-h], ..., raw[t+h]].
void window_row(const Eigen::VectorXd &raw, Index t, Index half,
                Eigen::VectorXd *row) {
  (*row)[0] = 1.0;
  for (Index k = -half; k <= half; ++k) {
    const Index s = t + k;
    (*row)[1 + k + half] = (s >= 0 && s < raw.size()) ? raw[s] : 0.0;
  }
}

}  // namespace

SharpenerModel train_sharpener(std::span<const DetectionCurve> raw,
                               std::span<const Eigen::VectorXd> labels,
                               Index window_len) {
  check_window(window_len);
  if (raw.size() != labels.size())
    throw Error(Errc::dimension_mismatch, "train_sharpener: curve/label count");
  const Index half = window_len / 2;
  const Index p = window_len + 1;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd row(p);
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const Eigen::VectorXd &x = raw[c].probs;
    if (x.size() != labels[c].size())
      throw Error(Errc::dimension_mismatch,
                  "train_sharpener: curve has " + std::to_string(x.size()) +
                      " frames, labels have " + std::to_string(labels[c].size()));
    for (Index t = 0; t < x.size(); ++t) {
      window_row(x, t, half, &row);
      gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
      rhs += labels[c][t] * row;
    }
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd solution =
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(gram).solve(rhs);
  SharpenerModel model;
  model.bias = solution[0];
  model.weights = solution.tail(window_len);
  return model;
}

SharpenerModel train_sharpener(const DetectionCurve &raw,
                               const Eigen::VectorXd &labels,
                               Index window_len) {
  return train_sharpener(std::span<const DetectionCurve>(&raw, 1),
                         std::span<const Eigen::VectorXd>(&labels, 1),
                         window_len);
}

Eigen::VectorXd sharpener_response(const SharpenerModel &model,
                                   const Eigen::VectorXd &raw) {
  check_window(model.window_len());
  const Index half = model.window_len() / 2;
  Eigen::VectorXd out(raw.size());
  for (Index t = 0; t < raw.size(); ++t) {
    double s = model.bias;
    for (Index k = -half; k <= half; ++k) {
      const Index i = t + k;
      if (i >= 0 && i < raw.size()) s += model.weights[k + half] * raw[i];
    }
    out[t] = s;
  }
  return out;
}

double sharpener_objective(const SharpenerModel &model,
                           const Eigen::VectorXd &raw,
                           const Eigen::VectorXd &labels) {
  return (sharpener_response(model, raw) - labels).squaredNorm();
}

DetectionCurve sharpen(const SharpenerModel &model, const DetectionCurve &raw) {
  DetectionCurve out = raw;
  out.probs = sharpener_response(model, raw.probs).cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

}  // namespace odo
