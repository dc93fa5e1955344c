// odo/src/duration_prior.cpp

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

#include "odo/duration_prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "odo/error.hpp"
#include "odo/gmm.hpp"

namespace odo {

std::pair<Index, Index> duration_range_frames(std::span<const double> durations,
                                              double hop_seconds, double widen) {
  if (durations.empty())
    throw Error(Errc::invalid_argument, "duration range of an empty set");
  const auto [lo, hi] = std::minmax_element(durations.begin(), durations.end());
  const Index tau_min = std::max<Index>(
      1, static_cast<Index>(std::floor((1.0 - widen) * *lo / hop_seconds)));
  const Index tau_max = std::max<Index>(
      tau_min, static_cast<Index>(std::ceil((1.0 + widen) * *hi / hop_seconds)));
  return {tau_min, tau_max};
}

Eigen::VectorXd discretise_gmm(const std::vector<DurationComponent> &components,
                               Index tau_min, Index tau_max, double hop_seconds) {
  Eigen::VectorXd pmf(tau_max - tau_min + 1);
  for (Index tau = tau_min; tau <= tau_max; ++tau) {
    const double d = tau * hop_seconds;
    double density = 0.0;
    for (const auto &c : components) {
      const double z = (d - c.mean_seconds) / c.std_seconds;
      density += c.weight * std::exp(-0.5 * z * z) /
                 (c.std_seconds * std::sqrt(2.0 * std::numbers::pi));
    }
    pmf[tau - tau_min] = density;
  }
  const double total = pmf.sum();
  if (!(total > 0.0)) {
    warn("duration GMM has no mass on [" + std::to_string(tau_min) + ", " +
         std::to_string(tau_max) + "] frames; using a flat pmf");
    return Eigen::VectorXd::Constant(pmf.size(), 1.0 / double(pmf.size()));
  }
  return pmf / total;
}

DurationPrior fit_duration_gmm(std::span<const double> durations,
                               Index n_components, std::uint64_t seed,
                               double hop_seconds, Index tau_min, Index tau_max,
                               std::vector<double> *trace) {
  if (durations.empty())
    throw Error(Errc::invalid_argument, "fit_duration_gmm: no durations");
  if (!(hop_seconds > 0.0))
    throw Error(Errc::invalid_argument, "fit_duration_gmm: hop must be positive");
  if (tau_min < 1 || tau_max < tau_min)
    throw Error(Errc::invalid_argument, "fit_duration_gmm: bad frame range");
  Eigen::MatrixXd x(static_cast<Index>(durations.size()), 1);
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (!(durations[i] > 0.0))
      throw Error(Errc::invalid_argument, "fit_duration_gmm: durations must be > 0");
    x(static_cast<Index>(i), 0) = durations[i];
  }
  GmmFitOptions opts;
  opts.n_components = n_components;
  opts.seed = seed;
  opts.variance_floor = 0.25 * hop_seconds * hop_seconds;
  opts.tolerance = 1e-8;
  opts.max_iterations = 500;
  GmmFitResult fit = fit_diag_gmm(x, opts);
  if (trace) *trace = fit.log_likelihood_trace;

  DurationPrior prior;
  prior.kind = PriorKind::gmm;
  prior.hop_seconds = hop_seconds;
  prior.tau_min = tau_min;
  prior.tau_max = tau_max;
  for (Index c = 0; c < fit.gmm.n_components(); ++c) {
    if (!(fit.gmm.weights[c] > 0.0)) continue;
    prior.components.push_back({fit.gmm.weights[c], fit.gmm.means(c, 0),
                                std::sqrt(fit.gmm.variances(c, 0))});
  }
  double total = 0.0;
  for (const auto &c : prior.components) total += c.weight;
  for (auto &c : prior.components) c.weight /= total;
  prior.pmf = discretise_gmm(prior.components, tau_min, tau_max, hop_seconds);
  return prior;
}

DurationPrior fit_duration_gmm(std::span<const double> durations,
                               Index n_components, std::uint64_t seed,
                               double hop_seconds, double widen,
                               std::vector<double> *trace) {
  const auto [tau_min, tau_max] =
      duration_range_frames(durations, hop_seconds, widen);
  return fit_duration_gmm(durations, n_components, seed, hop_seconds, tau_min,
                          tau_max, trace);
}

DurationPrior flat_prior(Index tau_min, Index tau_max, double hop_seconds) {
  if (tau_min < 1 || tau_max < tau_min)
    throw Error(Errc::invalid_argument,
                "flat_prior: need 1 <= tau_min <= tau_max, got [" +
                    std::to_string(tau_min) + ", " + std::to_string(tau_max) + "]");
  DurationPrior prior;
  prior.kind = PriorKind::flat;
  prior.tau_min = tau_min;
  prior.tau_max = tau_max;
  prior.hop_seconds = hop_seconds;
  prior.pmf = Eigen::VectorXd::Constant(tau_max - tau_min + 1,
                                        1.0 / double(tau_max - tau_min + 1));
  return prior;
}

double eval_prior(const DurationPrior &prior, Index tau) {
  if (tau < prior.tau_min || tau > prior.tau_max) return 0.0;
  return prior.pmf[tau - prior.tau_min];
}

double eval_prior(const DurationPrior &prior, Index tau, double hop_seconds) {
  if (prior.kind == PriorKind::flat || hop_seconds == prior.hop_seconds)
    return eval_prior(prior, tau);
  if (tau < prior.tau_min || tau > prior.tau_max) return 0.0;
  return discretise_gmm(prior.components, prior.tau_min, prior.tau_max,
                        hop_seconds)[tau - prior.tau_min];
}

}  // namespace odo
