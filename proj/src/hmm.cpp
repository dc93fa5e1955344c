// odo/src/hmm.cpp

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

#include "odo/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "odo/error.hpp"

namespace odo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// First frame whose midpoint is >= seconds, forgiving rounding of a
// fraction of a nanohop so that onset + duration lands where it should.
Index first_frame_at_or_after(double seconds, double hop) {
  const double s = seconds - 1e-9 * hop;
  Index t = static_cast<Index>(std::ceil(s / hop - 0.5));
  t = std::max<Index>(t, 0);
  while (t > 0 && frame_midpoint(t - 1, hop) >= s) --t;
  while (frame_midpoint(t, hop) < s) ++t;
  return t;
}

}  // namespace

int CardinalitySequence::max() const {
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

CardinalitySequence derive_cardinality(const Transcript &truth, Index n_frames,
                                       double hop_seconds) {
  if (!(hop_seconds > 0.0))
    throw Error(Errc::invalid_argument, "hop must be positive");
  std::vector<int> delta(n_frames + 1, 0);
  for (const Event &e : truth.events) {
    const Index a = std::min(first_frame_at_or_after(e.onset_seconds, hop_seconds), n_frames);
    const Index b = std::min(first_frame_at_or_after(e.offset_seconds(), hop_seconds), n_frames);
    if (a >= b) continue;
    ++delta[a];
    --delta[b];
  }
  CardinalitySequence out;
  out.counts.resize(n_frames);
  int running = 0;
  for (Index t = 0; t < n_frames; ++t) out.counts[t] = running += delta[t];
  return out;
}

MatrixX<float> augment_observations(const MatrixX<float> &observations,
                                    const DetectionCurve &on,
                                    const DetectionCurve &off) {
  if (on.size() != observations.rows() || off.size() != observations.rows())
    throw Error(Errc::dimension_mismatch,
                "augment_observations: curves do not cover every frame");
  MatrixX<float> out(observations.rows(), observations.cols() + 2);
  out.leftCols(observations.cols()) = observations;
  out.col(observations.cols()) = on.probs.cast<float>();
  out.col(observations.cols() + 1) = off.probs.cast<float>();
  return out;
}

HmmModel train_hmm(std::span<const HmmTrainingSequence> sequences,
                   const HmmOptions &options,
                   std::vector<std::vector<double>> *em_traces) {
  if (sequences.empty())
    throw Error(Errc::invalid_argument, "train_hmm: no training sequences");
  HmmModel model;
  model.expanded = options.expanded;
  model.obs_dim = sequences.front().observations.cols();
  for (const auto &seq : sequences) {
    if (seq.observations.cols() != model.obs_dim)
      throw Error(Errc::dimension_mismatch,
                  "train_hmm: observation dimensionality differs between sequences");
    if (seq.observations.rows() != seq.cardinality.size())
      throw Error(Errc::dimension_mismatch,
                  "train_hmm: " + std::to_string(seq.observations.rows()) +
                      " observation frames vs " +
                      std::to_string(seq.cardinality.size()) + " cardinalities");
    if (options.expanded && (seq.labels.onset_flags.size() != seq.cardinality.size() ||
                             seq.labels.offset_flags.size() != seq.cardinality.size()))
      throw Error(Errc::dimension_mismatch,
                  "train_hmm: expanded model needs edge flags for every frame");
    model.k_max = std::max(model.k_max, seq.cardinality.max());
  }
  const Index n_states = options.expanded ? 4 * Index(model.k_max + 1)
                                          : Index(model.k_max + 1);

  auto state_at = [&](const HmmTrainingSequence &seq, Index t) -> Index {
    const int k = seq.cardinality.counts[t];
    if (!options.expanded) return k;
    return HmmModel::expanded_state(k, seq.labels.onset_flags[t] > 0.5,
                                    seq.labels.offset_flags[t] > 0.5);
  };

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_states, n_states);
  model.initial = Eigen::VectorXd::Zero(n_states);
  std::vector<std::vector<std::pair<std::size_t, Index>>> frames(n_states);
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto &seq = sequences[s];
    if (seq.cardinality.size() == 0) continue;
    Index prev = state_at(seq, 0);
    model.initial[prev] += 1.0;
    frames[prev].push_back({s, 0});
    for (Index t = 1; t < seq.cardinality.size(); ++t) {
      const Index cur = state_at(seq, t);
      counts(prev, cur) += 1.0;
      frames[cur].push_back({s, t});
      prev = cur;
    }
  }
  if (model.initial.sum() > 0.0) model.initial /= model.initial.sum();

  model.transitions = Eigen::MatrixXd::Zero(n_states, n_states);
  for (Index i = 0; i < n_states; ++i) {
    Eigen::RowVectorXd row = counts.row(i);
    for (Index j = 0; j < n_states; ++j)
      if (row[j] > 0.0) row[j] += 1.0;
    const double total = row.sum();
    if (total > 0.0)
      model.transitions.row(i) = row / total;
    else
      model.transitions(i, i) = 1.0;
  }

  model.state_gmms.resize(n_states);
  model.state_present.assign(n_states, true);
  if (em_traces) em_traces->assign(n_states, {});
  std::vector<Index> absent;
  for (Index s = 0; s < n_states; ++s) {
    auto &rows = frames[s];
    if (rows.empty()) {
      if (!options.expanded)
        throw Error(Errc::empty_state,
                    "train_hmm: cardinality state " + std::to_string(s) +
                        " has no training frames");
      model.state_present[s] = false;
      absent.push_back(s);
      continue;
    }
    if (options.max_frames_per_state > 0 &&
        static_cast<Index>(rows.size()) > options.max_frames_per_state) {
      std::mt19937_64 rng(options.seed ^ (0x51ED27ull * std::uint64_t(s + 1)));
      std::vector<std::size_t> idx(rows.size());
      std::iota(idx.begin(), idx.end(), std::size_t(0));
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(options.max_frames_per_state);
      std::sort(idx.begin(), idx.end());
      std::vector<std::pair<std::size_t, Index>> kept;
      kept.reserve(idx.size());
      for (std::size_t i : idx) kept.push_back(rows[i]);
      rows.swap(kept);
    }
    Eigen::MatrixXd x(static_cast<Index>(rows.size()), model.obs_dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
      x.row(static_cast<Index>(i)) =
          sequences[rows[i].first].observations.row(rows[i].second).cast<double>();
    if (static_cast<Index>(rows.size()) < options.n_components)
      warn("train_hmm: state " + std::to_string(s) + " has only " +
           std::to_string(rows.size()) + " frames");
    GmmFitOptions gopts;
    gopts.n_components = options.n_components;
    gopts.seed = options.seed + 7919ull * std::uint64_t(s + 1);
    gopts.variance_floor = options.variance_floor;
    gopts.tolerance = options.tolerance;
    gopts.max_iterations = options.max_iterations;
    GmmFitResult fit = fit_diag_gmm(x, gopts);
    if (em_traces) (*em_traces)[s] = std::move(fit.log_likelihood_trace);
    model.state_gmms[s] = std::move(fit.gmm);
  }
  if (!absent.empty()) {
    std::string list;
    for (Index s : absent) list += (list.empty() ? "" : ",") + std::to_string(s);
    warn("train_hmm: expanded states never seen in training: " + list);
  }
  return model;
}

Eigen::MatrixXd emission_log_likelihoods(const HmmModel &model,
                                         const MatrixX<float> &observations) {
  if (observations.cols() != model.obs_dim)
    throw Error(Errc::dimension_mismatch,
                "HMM expects " + std::to_string(model.obs_dim) +
                    "-dimensional observations, got " +
                    std::to_string(observations.cols()));
  const Index n = observations.rows();
  Eigen::MatrixXd out(n, model.n_states());
  constexpr Index kBlock = 4096;
  for (Index start = 0; start < n; start += kBlock) {
    const Index len = std::min(kBlock, n - start);
    const Eigen::MatrixXd x = observations.middleRows(start, len).cast<double>();
    for (Index s = 0; s < model.n_states(); ++s) {
      if (!model.state_present[s])
        out.block(start, s, len, 1).setConstant(kNegInf);
      else
        out.block(start, s, len, 1) = model.state_gmms[s].log_likelihood(x);
    }
  }
  return out;
}

void decode_log_parameters(const HmmModel &model, Eigen::VectorXd *log_initial,
                           Eigen::MatrixXd *log_transitions) {
  *log_initial = model.initial.cwiseMax(kTransitionFloor).array().log().matrix();
  *log_transitions =
      model.transitions.cwiseMax(kTransitionFloor).array().log().matrix();
}

StatePath viterbi_decode(const Eigen::VectorXd &log_initial,
                         const Eigen::MatrixXd &log_transitions,
                         const Eigen::MatrixXd &log_emissions) {
  const Index n = log_emissions.rows(), s_count = log_emissions.cols();
  if (log_initial.size() != s_count || log_transitions.rows() != s_count ||
      log_transitions.cols() != s_count)
    throw Error(Errc::dimension_mismatch, "viterbi: parameter shapes disagree");
  StatePath path;
  if (n == 0) return path;
  Eigen::VectorXd delta = log_initial + log_emissions.row(0).transpose();
  std::vector<int> back(std::size_t(n) * s_count, 0);
  Eigen::VectorXd next(s_count);
  auto check = [&](const Eigen::VectorXd &d, Index t) {
    if (d.maxCoeff() == kNegInf)
      throw Error(Errc::unexplained_observation,
                  "model cannot explain observation at frame " + std::to_string(t));
  };
  check(delta, 0);
  for (Index t = 1; t < n; ++t) {
    for (Index j = 0; j < s_count; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (Index i = 0; i < s_count; ++i) {
        const double v = delta[i] + log_transitions(i, j);
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      next[j] = best + log_emissions(t, j);
      back[std::size_t(t) * s_count + j] = arg;
    }
    delta.swap(next);
    check(delta, t);
  }
  Index last = 0;
  for (Index j = 1; j < s_count; ++j)
    if (delta[j] > delta[last]) last = j;
  path.log_prob = delta[last];
  path.states.resize(n);
  path.states[n - 1] = static_cast<int>(last);
  for (Index t = n - 1; t > 0; --t)
    path.states[t - 1] = back[std::size_t(t) * s_count + path.states[t]];
  return path;
}

StatePath viterbi(const HmmModel &model, const MatrixX<float> &observations) {
  Eigen::VectorXd log_initial;
  Eigen::MatrixXd log_transitions;
  decode_log_parameters(model, &log_initial, &log_transitions);
  return viterbi_decode(log_initial, log_transitions,
                        emission_log_likelihoods(model, observations));
}

double path_log_prob(const Eigen::VectorXd &log_initial,
                     const Eigen::MatrixXd &log_transitions,
                     const Eigen::MatrixXd &log_emissions,
                     std::span<const int> path) {
  if (path.empty()) return 0.0;
  double lp = log_initial[path[0]] + log_emissions(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t)
    lp += log_transitions(path[t - 1], path[t]) +
          log_emissions(static_cast<Index>(t), path[t]);
  return lp;
}

Transcript cardinality_to_transcript(const CardinalitySequence &cardinality,
                                     double hop_seconds, PairingOrder order) {
  struct Span {
    Index onset, offset;
  };
  std::vector<Span> spans;
  std::deque<Index> open;
  int prev = 0;
  const Index n = cardinality.size();
  auto close = [&](Index frame) {
    Index onset;
    if (order == PairingOrder::fifo) {
      onset = open.front();
      open.pop_front();
    } else {
      onset = open.back();
      open.pop_back();
    }
    spans.push_back({onset, frame});
  };
  for (Index t = 0; t < n; ++t) {
    const int k = cardinality.counts[t];
    for (int d = prev; d < k; ++d) open.push_back(t);
    for (int d = k; d < prev; ++d) close(t);
    prev = k;
  }
  while (!open.empty()) close(n);

  std::sort(spans.begin(), spans.end(), [](const Span &a, const Span &b) {
    return a.onset != b.onset ? a.onset < b.onset : a.offset < b.offset;
  });
  Transcript tr;
  std::size_t merged = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i > 0 && spans[i].onset == spans[i - 1].onset &&
        spans[i].offset == spans[i - 1].offset) {
      ++merged;
      continue;
    }
    tr.events.push_back({frame_midpoint(spans[i].onset, hop_seconds),
                         double(spans[i].offset - spans[i].onset) * hop_seconds,
                         1.0});
  }
  if (merged > 0)
    warn("cardinality_to_transcript: merged " + std::to_string(merged) +
         " coincident event(s)");
  return tr;
}

CardinalitySequence path_cardinality(const StatePath &path,
                                     const HmmModel &model) {
  CardinalitySequence out;
  out.counts.reserve(path.states.size());
  for (int s : path.states) out.counts.push_back(model.cardinality(s));
  return out;
}

Transcript states_to_transcript(const StatePath &path, const HmmModel &model,
                                double hop_seconds, PairingOrder order) {
  return cardinality_to_transcript(path_cardinality(path, model), hop_seconds,
                                   order);
}

double hmm_count(const Transcript &transcript, double start_seconds,
                 double end_seconds, CalibrationFactor cal) {
  double n = 0.0;
  for (const Event &e : transcript.events)
    if (e.onset_seconds >= start_seconds && e.onset_seconds < end_seconds) n += 1.0;
  return cal.factor * n;
}

}  // namespace odo
