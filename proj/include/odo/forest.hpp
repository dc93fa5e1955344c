// odo/forest.hpp

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

#ifndef ODO_FOREST_HPP_
#define ODO_FOREST_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "odo/dsp.hpp"

namespace odo {

/// Internal node when feature >= 0 (rows with x[feature] < threshold go
/// left), leaf otherwise. `value` is the mean target of the node's samples.
struct TreeNode {
  std::int32_t feature = -1;
  float threshold = 0.0f;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const float *row) const {
    std::int32_t i = 0;
    while (nodes[i].feature >= 0)
      i = row[nodes[i].feature] < nodes[i].threshold ? nodes[i].left
                                                     : nodes[i].right;
    return nodes[i].value;
  }
  Index depth() const;
};

struct ForestParams {
  int n_trees = 20;
  int max_depth = 0;          // 0: grow until pure
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  int max_features = 0;       // 0: every feature is searched at every split
  bool bootstrap = true;
  int threads = 0;            // 0: hardware concurrency
};

struct ForestModel {
  std::vector<RegressionTree> trees;
  Index feature_dim = 0;
  ForestParams params;

  Index n_trees() const { return static_cast<Index>(trees.size()); }
};

/// Bagged variance-reduction regression trees. Deterministic given `seed`;
/// the result does not depend on the thread count. When `oob` is given it
/// receives, per training row, the mean prediction of the trees whose
/// bootstrap left that row out (all trees if none did).
ForestModel train_forest(const MatrixX<float> &patches,
                         const Eigen::VectorXd &targets, std::uint64_t seed,
                         const ForestParams &params = {},
                         Eigen::VectorXd *oob = nullptr);

ForestModel train_forest(std::span<const FeatureVector<float>> patches,
                         const Eigen::VectorXd &targets, int n_trees,
                         std::uint64_t seed);

/// Mean over trees, one value per row of `patches`.
Eigen::VectorXd forest_predict(const ForestModel &model,
                               const MatrixX<float> &patches);

}  // namespace odo

#endif  // ODO_FOREST_HPP_
