// odo/src/odo.cpp

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

#include "odo/odo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "odo/error.hpp"

namespace odo {

EventPosterior build_posterior(const DetectionCurve &on,
                               const DetectionCurve &off,
                               const DurationPrior &prior) {
  if (on.size() != off.size())
    throw Error(Errc::dimension_mismatch,
                "build_posterior: onset curve has " + std::to_string(on.size()) +
                    " frames, offset curve " + std::to_string(off.size()));
  if (on.hop_seconds != off.hop_seconds)
    throw Error(Errc::invalid_argument, "build_posterior: curves differ in hop");
  const Index n = on.size();
  EventPosterior post;
  post.tau_min = prior.tau_min;
  post.tau_max = prior.tau_max;
  post.hop_seconds = on.hop_seconds;
  post.values = Eigen::MatrixXd::Zero(n, prior.n_taus());
  Eigen::VectorXd pmf(prior.n_taus());
  for (Index tau = prior.tau_min; tau <= prior.tau_max; ++tau)
    pmf[tau - prior.tau_min] = eval_prior(prior, tau, on.hop_seconds);
  for (Index t = 0; t < n; ++t) {
    const double p_on = on.probs[t];
    if (p_on == 0.0) continue;
    for (Index j = 0; j < prior.n_taus(); ++j) {
      const Index o = t + prior.tau_min + j;
      if (o >= n) break;
      post.values(t, j) = p_on * off.probs[o] * pmf[j];
    }
  }
  return post;
}

std::vector<Candidate> dominant_candidates(const EventPosterior &post) {
  const Index n = post.n_frames(), m = post.n_taus();
  std::vector<Index> row_best(n, -1);
  for (Index t = 0; t < n; ++t) {
    double best = -1.0;
    for (Index j = 0; j < m; ++j) {
      if (t + post.tau_min + j >= n) break;
      if (post.values(t, j) > best) {
        best = post.values(t, j);
        row_best[t] = j;
      }
    }
  }
  // Anti-diagonal winners, visited in increasing tau so the first maximum
  // is the shortest.
  std::vector<double> diag_val(n, -1.0);
  std::vector<Index> diag_best(n, -1);
  for (Index j = 0; j < m; ++j) {
    const Index tau = post.tau_min + j;
    for (Index t = 0; t + tau < n; ++t) {
      const Index o = t + tau;
      if (post.values(t, j) > diag_val[o]) {
        diag_val[o] = post.values(t, j);
        diag_best[o] = j;
      }
    }
  }
  std::vector<Candidate> out;
  for (Index t = 0; t < n; ++t) {
    const Index j = row_best[t];
    if (j < 0) continue;
    const double v = post.values(t, j);
    if (!(v > 0.0)) continue;
    if (diag_best[t + post.tau_min + j] != j) continue;
    out.push_back({t, post.tau_min + j, v});
  }
  return out;
}

Transcript candidates_to_transcript(std::span<const Candidate> candidates,
                                    double hop_seconds, double threshold) {
  Transcript tr;
  for (const Candidate &c : candidates) {
    if (!(c.value > threshold)) continue;
    tr.events.push_back({frame_midpoint(c.onset_frame, hop_seconds),
                         double(c.tau) * hop_seconds, c.value});
  }
  tr.sort();
  return tr;
}

Transcript extract_transcript(const EventPosterior &post, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(Errc::invalid_argument, "threshold must lie in [0, 1]");
  const auto candidates = dominant_candidates(post);
  return candidates_to_transcript(candidates, post.hop_seconds, threshold);
}

double select_threshold(std::span<const EventPosterior> posteriors,
                        std::span<const Transcript> truths,
                        const MatchConfig &cfg, std::size_t max_grid) {
  if (posteriors.empty())
    throw Error(Errc::invalid_argument, "select_threshold: empty training set");
  if (posteriors.size() != truths.size())
    throw Error(Errc::dimension_mismatch,
                "select_threshold: posterior/transcript count mismatch");
  std::size_t n_truth = 0;
  for (const auto &t : truths) n_truth += t.size();
  if (n_truth == 0)
    warn("select_threshold: training transcripts are empty; "
         "suppressing every detection");

  std::vector<std::vector<Candidate>> candidates;
  std::vector<double> values{0.0};
  for (const auto &post : posteriors) {
    candidates.push_back(dominant_candidates(post));
    for (const auto &c : candidates.back()) values.push_back(c.value);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> grid;
  if (values.size() <= std::max<std::size_t>(max_grid, 2)) {
    grid = values;
  } else {
    for (std::size_t k = 0; k < max_grid; ++k) {
      const std::size_t i = static_cast<std::size_t>(std::llround(
          double(k) * double(values.size() - 1) / double(max_grid - 1)));
      if (grid.empty() || values[i] != grid.back()) grid.push_back(values[i]);
    }
  }

  double best_threshold = grid.front(), best_f = -1.0;
  for (double th : grid) {
    std::size_t matched = 0, n_est = 0;
    for (std::size_t s = 0; s < posteriors.size(); ++s) {
      const Transcript est = candidates_to_transcript(
          candidates[s], posteriors[s].hop_seconds, th);
      matched += match_events(est, truths[s], cfg).size();
      n_est += est.size();
    }
    const double f = f_measure(matched, n_est, n_truth).f_measure;
    if (f >= best_f) {
      best_f = f;
      best_threshold = th;
    }
  }
  return best_threshold;
}

namespace {

// Row masses are summed on a 2^-36 grid, so window sums add up exactly in a
// double while the total stays below 2^17 events.
constexpr double kGrid = 68719476736.0;  // 2^36

std::int64_t row_mass(const EventPosterior &post, Index t) {
  return static_cast<std::int64_t>(std::llround(post.values.row(t).sum() * kGrid));
}

}  // namespace

double expected_count(const EventPosterior &post, double start_seconds,
                      double end_seconds, CalibrationFactor cal) {
  if (!(start_seconds < end_seconds))
    throw Error(Errc::invalid_argument, "expected_count: start must be < end");
  std::int64_t mass = 0;
  for (Index t = 0; t < post.n_frames(); ++t) {
    const double mid = frame_midpoint(t, post.hop_seconds);
    if (mid >= start_seconds && mid < end_seconds) mass += row_mass(post, t);
  }
  return cal.factor * (double(mass) / kGrid);
}

std::vector<double> expected_counts(const EventPosterior &post,
                                    std::span<const CountWindow> windows,
                                    CalibrationFactor cal) {
  std::vector<std::int64_t> mass(windows.size(), 0);
  for (Index t = 0; t < post.n_frames(); ++t) {
    const double mid = frame_midpoint(t, post.hop_seconds);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      if (mid >= windows[w].start_seconds && mid < windows[w].end_seconds) {
        mass[w] += row_mass(post, t);
        break;
      }
    }
  }
  std::vector<double> out(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w)
    out[w] = cal.factor * (double(mass[w]) / kGrid);
  return out;
}

CalibrationFactor fit_calibration(std::span<const double> estimates,
                                  std::span<const double> truths) {
  if (estimates.size() != truths.size())
    throw Error(Errc::dimension_mismatch, "fit_calibration: length mismatch");
  double se = 0.0, st = 0.0;
  for (double e : estimates) se += e;
  for (double t : truths) st += t;
  if (!(se > 0.0)) {
    if (st == 0.0) return {};
    throw Error(Errc::degenerate_supervision,
                "fit_calibration: zero estimated mass against " +
                    std::to_string(st) + " true events");
  }
  if (!(st > 0.0))
    throw Error(Errc::degenerate_supervision,
                "fit_calibration: no true events to calibrate against");
  return {st / se};
}

}  // namespace odo
