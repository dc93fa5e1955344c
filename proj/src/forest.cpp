// odo/src/forest.cpp

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

#include "odo/forest.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "odo/error.hpp"

namespace odo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Training data shared by every tree: feature-major values and, per
// feature, the row order that sorts it.
struct PresortedData {
  Index n_rows = 0;
  Index n_features = 0;
  std::vector<float> columns;         // [feature][row]
  std::vector<std::int32_t> order;    // [feature][rank] -> row
  const Eigen::VectorXd *targets = nullptr;

  float value(Index feature, std::int32_t row) const {
    return columns[feature * n_rows + row];
  }
};

PresortedData presort(const MatrixX<float> &x, const Eigen::VectorXd &y) {
  PresortedData data;
  data.n_rows = x.rows();
  data.n_features = x.cols();
  data.targets = &y;
  data.columns.resize(std::size_t(x.rows()) * x.cols());
  data.order.resize(data.columns.size());
  for (Index f = 0; f < x.cols(); ++f) {
    float *col = data.columns.data() + f * x.rows();
    for (Index r = 0; r < x.rows(); ++r) col[r] = x(r, f);
    std::int32_t *ord = data.order.data() + f * x.rows();
    std::iota(ord, ord + x.rows(), 0);
    std::stable_sort(ord, ord + x.rows(), [col](std::int32_t a, std::int32_t b) {
      return col[a] < col[b];
    });
  }
  return data;
}

struct SplitChoice {
  Index feature = -1;
  float threshold = 0.0f;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const PresortedData &data, std::span<const int> weight,
              const ForestParams &params, std::uint64_t seed)
      : data_(data), weight_(weight), params_(params), rng_(seed) {
    for (Index r = 0; r < data.n_rows; ++r)
      if (weight[r] > 0) ++n_active_;
    sorted_.resize(std::size_t(n_active_) * data.n_features);
    for (Index f = 0; f < data.n_features; ++f) {
      const std::int32_t *ord = data.order.data() + f * data.n_rows;
      std::int32_t *dst = sorted_.data() + f * n_active_;
      for (Index k = 0; k < data.n_rows; ++k)
        if (weight[ord[k]] > 0) *dst++ = ord[k];
    }
    goes_left_.assign(data.n_rows, 0);
    scratch_.resize(n_active_);
    features_.resize(data.n_features);
    std::iota(features_.begin(), features_.end(), Index(0));
  }

  RegressionTree build() {
    RegressionTree tree;
    struct Pending {
      std::int32_t node;
      Index begin, end, depth;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, n_active_, 0});
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      double w = 0.0, wy = 0.0;
      double y_min = 0.0, y_max = 0.0;
      const std::int32_t *rows = sorted_.data() + p.begin;  // feature 0
      for (Index i = 0; i < p.end - p.begin; ++i) {
        const double y = (*data_.targets)[rows[i]];
        w += weight_[rows[i]];
        wy += weight_[rows[i]] * y;
        if (i == 0 || y < y_min) y_min = y;
        if (i == 0 || y > y_max) y_max = y;
      }
      tree.nodes[p.node].value = wy / w;
      const bool depth_ok = params_.max_depth <= 0 || p.depth < params_.max_depth;
      if (y_min == y_max || w < params_.min_samples_split || !depth_ok) continue;
      const SplitChoice split = best_split(p.begin, p.end, w, wy);
      if (split.feature < 0) continue;
      const Index n_left = partition(p.begin, p.end, split);
      const auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode &node = tree.nodes[p.node];
      node.feature = static_cast<std::int32_t>(split.feature);
      node.threshold = split.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, p.begin + n_left, p.end, p.depth + 1});
      stack.push_back({left, p.begin, p.begin + n_left, p.depth + 1});
    }
    return tree;
  }

 private:
  SplitChoice best_split(Index begin, Index end, double w_total,
                         double wy_total) {
    Index n_candidates = data_.n_features;
    if (params_.max_features > 0 && params_.max_features < data_.n_features) {
      n_candidates = params_.max_features;
      for (Index i = 0; i < n_candidates; ++i) {
        std::uniform_int_distribution<Index> pick(i, data_.n_features - 1);
        std::swap(features_[i], features_[pick(rng_)]);
      }
      std::sort(features_.begin(), features_.begin() + n_candidates);
    }
    SplitChoice best;
    best.score = -std::numeric_limits<double>::infinity();
    const double min_leaf = params_.min_samples_leaf;
    for (Index c = 0; c < n_candidates; ++c) {
      const Index f = features_[c];
      const std::int32_t *rows = sorted_.data() + f * n_active_;
      double wl = 0.0, wyl = 0.0;
      for (Index i = begin; i + 1 < end; ++i) {
        const std::int32_t r = rows[i];
        wl += weight_[r];
        wyl += weight_[r] * (*data_.targets)[r];
        const float a = data_.value(f, r);
        const float b = data_.value(f, rows[i + 1]);
        if (!(a < b)) continue;
        const double wr = w_total - wl;
        if (wl < min_leaf || wr < min_leaf) continue;
        const double wyr = wy_total - wyl;
        const double score = wyl * wyl / wl + wyr * wyr / wr;
        if (score > best.score) {
          best.score = score;
          best.feature = f;
          float t = static_cast<float>(0.5 * (double(a) + double(b)));
          if (!(t > a)) t = b;
          best.threshold = t;
        }
      }
    }
    return best;
  }

  Index partition(Index begin, Index end, const SplitChoice &split) {
    const std::int32_t *rows = sorted_.data() + split.feature * n_active_;
    Index n_left = 0;
    for (Index i = begin; i < end; ++i) {
      const bool left = data_.value(split.feature, rows[i]) < split.threshold;
      goes_left_[rows[i]] = left;
      n_left += left;
    }
    for (Index f = 0; f < data_.n_features; ++f) {
      std::int32_t *seg = sorted_.data() + f * n_active_;
      Index l = begin, r = 0;
      for (Index i = begin; i < end; ++i) {
        if (goes_left_[seg[i]])
          seg[l++] = seg[i];
        else
          scratch_[r++] = seg[i];
      }
      std::copy(scratch_.begin(), scratch_.begin() + r, seg + l);
    }
    return n_left;
  }

  const PresortedData &data_;
  std::span<const int> weight_;
  const ForestParams &params_;
  std::mt19937_64 rng_;
  Index n_active_ = 0;
  std::vector<std::int32_t> sorted_;  // [feature][position] -> row
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::int32_t> scratch_;
  std::vector<Index> features_;
};

}  // namespace

Index RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<Index> depth(nodes.size(), 0);
  Index deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (nodes[i].feature >= 0) {
      depth[nodes[i].left] = depth[i] + 1;
      depth[nodes[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

ForestModel train_forest(const MatrixX<float> &patches,
                         const Eigen::VectorXd &targets, std::uint64_t seed,
                         const ForestParams &params, Eigen::VectorXd *oob) {
  const Index n = patches.rows();
  if (n != targets.size())
    throw Error(Errc::dimension_mismatch,
                "train_forest: " + std::to_string(n) + " patches but " +
                    std::to_string(targets.size()) + " targets");
  if (n < 2)
    throw Error(Errc::invalid_argument, "train_forest: need at least 2 patches");
  if (targets.minCoeff() == targets.maxCoeff())
    throw Error(Errc::degenerate_supervision,
                "degenerate supervision: every target equals " +
                    std::to_string(targets[0]));
  if (params.n_trees < 1)
    throw Error(Errc::invalid_argument, "train_forest: n_trees must be >= 1");

  const PresortedData data = presort(patches, targets);
  ForestModel model;
  model.feature_dim = patches.cols();
  model.params = params;
  model.trees.resize(params.n_trees);

  // Bootstrap multiplicities are drawn up front so trees are independent of
  // scheduling.
  std::vector<std::vector<int>> weights(params.n_trees);
  std::vector<std::uint64_t> tree_seeds(params.n_trees);
  for (int k = 0; k < params.n_trees; ++k) {
    tree_seeds[k] = splitmix64(seed ^ splitmix64(std::uint64_t(k) + 1));
    std::mt19937_64 rng(tree_seeds[k]);
    auto &w = weights[k];
    if (params.bootstrap) {
      w.assign(n, 0);
      std::uniform_int_distribution<Index> pick(0, n - 1);
      for (Index i = 0; i < n; ++i) ++w[pick(rng)];
    } else {
      w.assign(n, 1);
    }
  }

  int threads = params.threads > 0
                    ? params.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, params.n_trees);
  auto fit_range = [&](int worker) {
    for (int k = worker; k < params.n_trees; k += threads) {
      TreeBuilder builder(data, weights[k], params, tree_seeds[k] + 1);
      model.trees[k] = builder.build();
    }
  };
  if (threads <= 1) {
    fit_range(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(fit_range, t);
  }

  if (oob) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    Eigen::VectorXi count = Eigen::VectorXi::Zero(n);
    Eigen::VectorXd all = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < params.n_trees; ++k) {
      for (Index r = 0; r < n; ++r) {
        const double p = model.trees[k].predict(patches.row(r).data());
        all[r] += p;
        if (weights[k][r] == 0) {
          sum[r] += p;
          ++count[r];
        }
      }
    }
    oob->resize(n);
    for (Index r = 0; r < n; ++r)
      (*oob)[r] = count[r] > 0 ? sum[r] / count[r] : all[r] / params.n_trees;
  }
  return model;
}

ForestModel train_forest(std::span<const FeatureVector<float>> patches,
                         const Eigen::VectorXd &targets, int n_trees,
                         std::uint64_t seed) {
  if (patches.empty())
    throw Error(Errc::invalid_argument, "train_forest: no patches");
  const Index dim = patches.front().values.size();
  MatrixX<float> x(static_cast<Index>(patches.size()), dim);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (patches[i].values.size() != dim)
      throw Error(Errc::dimension_mismatch,
                  "train_forest: patches differ in dimensionality");
    x.row(static_cast<Index>(i)) = patches[i].values.transpose();
  }
  ForestParams params;
  params.n_trees = n_trees;
  return train_forest(x, targets, seed, params);
}

Eigen::VectorXd forest_predict(const ForestModel &model,
                               const MatrixX<float> &patches) {
  if (patches.cols() != model.feature_dim)
    throw Error(Errc::dimension_mismatch,
                "forest expects " + std::to_string(model.feature_dim) +
                    " features, got " + std::to_string(patches.cols()));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(patches.rows());
  if (model.trees.empty()) return out;
  for (Index r = 0; r < patches.rows(); ++r) {
    const float *row = patches.row(r).data();
    double s = 0.0;
    for (const auto &tree : model.trees) s += tree.predict(row);
    out[r] = s / double(model.trees.size());
  }
  return out;
}

}  // namespace odo
