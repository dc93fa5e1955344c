// odo/duration_prior.hpp

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

#ifndef ODO_DURATION_PRIOR_HPP_
#define ODO_DURATION_PRIOR_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace odo {

using Eigen::Index;

enum class PriorKind { gmm, flat };

struct DurationComponent {
  double weight = 1.0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
};

/// Prior over event durations, discretised to a pmf over whole frames
/// tau in [tau_min, tau_max] at hop_seconds.
struct DurationPrior {
  PriorKind kind = PriorKind::flat;
  std::vector<DurationComponent> components;  // empty for flat priors
  Index tau_min = 1;
  Index tau_max = 1;
  double hop_seconds = 0.0;
  Eigen::VectorXd pmf;  // pmf[tau - tau_min]

  Index n_taus() const { return tau_max - tau_min + 1; }
};

/// [tau_min, tau_max] covering the observed durations widened by `widen` on
/// each side.
std::pair<Index, Index> duration_range_frames(std::span<const double> durations,
                                              double hop_seconds,
                                              double widen = 0.25);

/// 1-D EM fit of the durations (seconds). The variance is floored at
/// (hop/2)^2. `trace`, when given, receives the per-iteration mean
/// log-likelihood.
DurationPrior fit_duration_gmm(std::span<const double> durations,
                               Index n_components, std::uint64_t seed,
                               double hop_seconds, double widen = 0.25,
                               std::vector<double> *trace = nullptr);

/// Same as above with an explicit frame range.
DurationPrior fit_duration_gmm(std::span<const double> durations,
                               Index n_components, std::uint64_t seed,
                               double hop_seconds, Index tau_min, Index tau_max,
                               std::vector<double> *trace = nullptr);

DurationPrior flat_prior(Index tau_min, Index tau_max, double hop_seconds = 0.0);

/// pmf(tau); zero outside [tau_min, tau_max].
double eval_prior(const DurationPrior &prior, Index tau);

/// pmf(tau) after re-discretising over the same frame range at another hop.
double eval_prior(const DurationPrior &prior, Index tau, double hop_seconds);

/// Normalised pmf of a duration GMM over [tau_min, tau_max] at the given hop.
Eigen::VectorXd discretise_gmm(const std::vector<DurationComponent> &components,
                               Index tau_min, Index tau_max, double hop_seconds);

}  // namespace odo

#endif  // ODO_DURATION_PRIOR_HPP_
