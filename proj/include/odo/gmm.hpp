// odo/gmm.hpp

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

#ifndef ODO_GMM_HPP_
#define ODO_GMM_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace odo {

using Eigen::Index;

/// Gaussian mixture with diagonal covariances.
struct DiagGmm {
  Eigen::VectorXd weights;    // n_components
  Eigen::MatrixXd means;      // n_components x dim
  Eigen::MatrixXd variances;  // n_components x dim

  Index n_components() const { return weights.size(); }
  Index dim() const { return means.cols(); }

  /// log(w_c) + log N(x_n; mu_c, diag var_c), rows x components.
  Eigen::MatrixXd joint_log_densities(const Eigen::MatrixXd &x) const;
  /// Per-row log density of the mixture.
  Eigen::VectorXd log_likelihood(const Eigen::MatrixXd &x) const;
  double log_density(const Eigen::VectorXd &x) const;
};

struct GmmFitOptions {
  Index n_components = 1;
  std::uint64_t seed = 0;
  double variance_floor = 1e-6;
  double tolerance = 1e-8;  // on the mean per-sample log-likelihood gain
  int max_iterations = 500;
};

struct GmmFitResult {
  DiagGmm gmm;
  /// Mean per-sample log-likelihood after initialisation and after every
  /// M-step; EM makes this non-decreasing.
  std::vector<double> log_likelihood_trace;
  bool converged = false;
};

/// EM from a k-means++ initialisation. The component count shrinks, with a
/// warning, when there are fewer samples or distinct points than requested.
GmmFitResult fit_diag_gmm(const Eigen::MatrixXd &x, const GmmFitOptions &options);

/// Row-wise log-sum-exp.
Eigen::VectorXd log_sum_exp_rows(const Eigen::MatrixXd &m);

}  // namespace odo

#endif  // ODO_GMM_HPP_
