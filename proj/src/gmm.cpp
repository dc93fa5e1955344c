// odo/src/gmm.cpp

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

#include "odo/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "odo/error.hpp"

namespace odo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k-means++ seeding. Stops early when every remaining point coincides with a
// chosen centre.
std::vector<Index> kmeanspp_centres(const Eigen::MatrixXd &x, Index k,
                                    std::mt19937_64 &rng) {
  const Index n = x.rows();
  std::vector<Index> centres;
  std::uniform_int_distribution<Index> first(0, n - 1);
  centres.push_back(first(rng));
  Eigen::VectorXd d2 = (x.rowwise() - x.row(centres[0])).rowwise().squaredNorm();
  while (static_cast<Index>(centres.size()) < k) {
    const double total = d2.sum();
    if (!(total > 0.0)) break;
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng), acc = 0.0;
    Index pick = n - 1;
    for (Index i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    if (d2[pick] <= 0.0) {
      for (pick = n - 1; pick >= 0 && d2[pick] <= 0.0; --pick) {}
    }
    centres.push_back(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return centres;
}

}  // namespace

Eigen::VectorXd log_sum_exp_rows(const Eigen::MatrixXd &m) {
  Eigen::VectorXd out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).maxCoeff();
    if (mx == kNegInf) {
      out[i] = kNegInf;
      continue;
    }
    out[i] = mx + std::log((m.row(i).array() - mx).exp().sum());
  }
  return out;
}

Eigen::MatrixXd DiagGmm::joint_log_densities(const Eigen::MatrixXd &x) const {
  const Index c = n_components();
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  Eigen::MatrixXd out(x.rows(), c);
  for (Index k = 0; k < c; ++k) {
    if (!(weights[k] > 0.0)) {
      out.col(k).setConstant(kNegInf);
      continue;
    }
    const Eigen::ArrayXd inv_var = variances.row(k).transpose().array().inverse();
    const double norm = std::log(weights[k]) -
                        0.5 * (dim() * log_2pi +
                               variances.row(k).array().log().sum());
    out.col(k) = (norm - 0.5 * ((x.rowwise() - means.row(k)).array().square().rowwise() *
                                inv_var.transpose())
                                   .rowwise()
                                   .sum())
                     .matrix();
  }
  return out;
}

Eigen::VectorXd DiagGmm::log_likelihood(const Eigen::MatrixXd &x) const {
  return log_sum_exp_rows(joint_log_densities(x));
}

double DiagGmm::log_density(const Eigen::VectorXd &x) const {
  return log_likelihood(x.transpose())[0];
}

GmmFitResult fit_diag_gmm(const Eigen::MatrixXd &x,
                          const GmmFitOptions &options) {
  const Index n = x.rows(), dim = x.cols();
  if (n < 1 || dim < 1)
    throw Error(Errc::invalid_argument, "fit_diag_gmm: empty data");
  if (options.n_components < 1)
    throw Error(Errc::invalid_argument, "fit_diag_gmm: need >= 1 component");
  if (!(options.variance_floor > 0.0))
    throw Error(Errc::invalid_argument, "fit_diag_gmm: variance floor must be > 0");

  Index k = options.n_components;
  if (n < k) {
    warn("GMM: " + std::to_string(n) + " samples for " + std::to_string(k) +
         " components; using " + std::to_string(n));
    k = n;
  }
  std::mt19937_64 rng(options.seed);
  const std::vector<Index> centres = kmeanspp_centres(x, k, rng);
  if (static_cast<Index>(centres.size()) < k) {
    warn("GMM: only " + std::to_string(centres.size()) +
         " distinct points; reducing components from " + std::to_string(k));
    k = static_cast<Index>(centres.size());
  }

  // Initialise from the hard k-means++ partition.
  const Eigen::RowVectorXd global_mean = x.colwise().mean();
  const Eigen::RowVectorXd global_var =
      ((x.rowwise() - global_mean).array().square().colwise().sum() / double(n))
          .matrix()
          .cwiseMax(options.variance_floor);
  DiagGmm gmm;
  gmm.weights = Eigen::VectorXd::Zero(k);
  gmm.means.resize(k, dim);
  gmm.variances = Eigen::MatrixXd::Zero(k, dim);
  for (Index c = 0; c < k; ++c) gmm.means.row(c) = x.row(centres[c]);
  std::vector<Index> assign(n);
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < k; ++c) {
      const double d = (x.row(i) - gmm.means.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assign[i] = best;
    gmm.weights[best] += 1.0;
    gmm.variances.row(best) += (x.row(i) - gmm.means.row(best)).array().square().matrix();
  }
  for (Index c = 0; c < k; ++c) {
    if (gmm.weights[c] >= 2.0)
      gmm.variances.row(c) =
          (gmm.variances.row(c) / gmm.weights[c]).cwiseMax(options.variance_floor);
    else
      gmm.variances.row(c) = global_var;
  }
  gmm.weights /= double(n);

  GmmFitResult result;
  Eigen::MatrixXd joint = gmm.joint_log_densities(x);
  Eigen::VectorXd lse = log_sum_exp_rows(joint);
  double ll = lse.mean();
  result.log_likelihood_trace.push_back(ll);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::MatrixXd resp = (joint.colwise() - lse).array().exp().matrix();
    const Eigen::VectorXd mass = resp.colwise().sum().transpose();
    for (Index c = 0; c < k; ++c) {
      if (!(mass[c] > 0.0)) {
        gmm.weights[c] = 0.0;
        continue;
      }
      gmm.weights[c] = mass[c] / double(n);
      gmm.means.row(c) = (resp.col(c).transpose() * x) / mass[c];
      gmm.variances.row(c) =
          ((resp.col(c).transpose() *
            (x.rowwise() - gmm.means.row(c)).array().square().matrix()) /
           mass[c])
              .cwiseMax(options.variance_floor);
    }
    joint = gmm.joint_log_densities(x);
    lse = log_sum_exp_rows(joint);
    const double next = lse.mean();
    result.log_likelihood_trace.push_back(next);
    const double gain = next - ll;
    ll = next;
    if (gain < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.gmm = std::move(gmm);
  return result;
}

}  // namespace odo
