// odo/tests/test_detectors.cpp

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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "odo/detectors.hpp"
#include "odo/error.hpp"
#include "oracles.hpp"

using namespace odo;

namespace {

MatrixX<float> random_features(std::mt19937_64 &rng, Index n, Index d) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  MatrixX<float> x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = u(rng);
  return x;
}

DetectionCurve curve_of(const Eigen::VectorXd &v) {
  DetectionCurve c;
  c.probs = v;
  c.hop_seconds = 0.01;
  return c;
}

}  // namespace

TEST_CASE("labels from a transcript") {
  const double hop = 1024.0 / 96000.0;
  Transcript tr;
  tr.events.push_back({1.0, 0.1, 1.0});
  const auto lab = labels_from_transcript(tr, 200, hop);
  // floor(time / hop) oracle.
  CHECK(Index(std::floor(1.0 / hop)) == 93);
  CHECK(Index(std::floor(1.1 / hop)) == 103);
  CHECK(lab.onset_flags[93] == 1.0);
  CHECK(lab.offset_flags[103] == 1.0);
  CHECK(lab.onset_flags.sum() == 1.0);
  CHECK(lab.offset_flags.sum() == 1.0);

  const auto empty = labels_from_transcript(Transcript{}, 50, hop);
  CHECK(empty.onset_flags.sum() == 0.0);
  CHECK(empty.offset_flags.size() == 50);

  Transcript two;
  two.events.push_back({1.0, 0.1, 1.0});
  two.events.push_back({1.001, 0.2, 1.0});
  const auto collapsed = labels_from_transcript(two, 200, hop);
  CHECK(collapsed.onset_flags.sum() == 1.0);
  CHECK(collapsed.offset_flags.sum() == 2.0);

  Transcript late;
  late.events.push_back({0.5, 0.2, 1.0});
  CHECK_THROWS_AS(labels_from_transcript(late, 60, hop), Error);
}

TEST_CASE("frame-aligned onsets round-trip through frame midpoints") {
  const double hop = 0.01;
  Transcript tr;
  for (Index f : {3, 17, 40}) tr.events.push_back({double(f) * hop, 0.05, 1.0});
  const auto lab = labels_from_transcript(tr, 100, hop);
  for (Index t = 0; t < 100; ++t)
    if (lab.onset_flags[t] > 0)
      CHECK(frame_containing(frame_midpoint(t, hop), hop) == t);
  CHECK(lab.onset_flags[3] == 1.0);
  CHECK(lab.onset_flags[17] == 1.0);
  CHECK(lab.onset_flags[40] == 1.0);
}

TEST_CASE("forest fits separable data exactly") {
  std::mt19937_64 rng(3);
  // Feature 2 separates the classes with a margin, so every bootstrap
  // resample still finds a split that is exact on the full training set.
  auto x = random_features(rng, 200, 6);
  Eigen::VectorXd y(200);
  for (Index i = 0; i < 200; ++i) {
    y[i] = x(i, 2) > 0.0f ? 1.0 : 0.0;
    x(i, 2) += x(i, 2) > 0.0f ? 0.5f : -0.5f;
  }
  ForestParams p;
  p.n_trees = 20;
  const auto m = train_forest(x, y, 11, p);
  CHECK(m.n_trees() == 20);
  for (const auto &tree : m.trees)
    for (Index i = 0; i < 200; ++i) CHECK(tree.predict(x.row(i).data()) == y[i]);
  for (const auto &tree : m.trees)
    for (const auto &node : tree.nodes) CHECK(node.feature < m.feature_dim);
}

TEST_CASE("forest training is deterministic and thread-count independent") {
  std::mt19937_64 rng(4);
  auto x = random_features(rng, 300, 10);
  Eigen::VectorXd y = testing::random_unit(rng, 300).array().round();
  ForestParams p;
  p.threads = 1;
  const auto a = train_forest(x, y, 99, p);
  p.threads = 3;
  const auto b = train_forest(x, y, 99, p);
  const auto pa = forest_predict(a, x), pb = forest_predict(b, x);
  CHECK((pa.array() == pb.array()).all());
  auto probe = random_features(rng, 50, 10);
  CHECK((forest_predict(a, probe).array() == forest_predict(b, probe).array()).all());
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t)
    CHECK(a.trees[t].nodes.size() == b.trees[t].nodes.size());
}

TEST_CASE("depth-one tree on {(0,0),(1,1)}") {
  MatrixX<float> x(2, 1);
  x << 0.0f, 1.0f;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  ForestParams p;
  p.n_trees = 1;
  p.max_depth = 1;
  p.bootstrap = false;
  const auto m = train_forest(x, y, 1, p);
  REQUIRE(m.trees.front().nodes.size() == 3);
  CHECK(m.trees.front().nodes[0].threshold == 0.5f);
  for (float v : {-3.0f, 0.0f, 0.49f}) CHECK(m.trees.front().predict(&v) == 0.0);
  for (float v : {0.5f, 0.51f, 1.0f, 7.0f}) CHECK(m.trees.front().predict(&v) == 1.0);
}

TEST_CASE("forest rejects degenerate supervision") {
  std::mt19937_64 rng(5);
  auto x = random_features(rng, 20, 3);
  try {
    train_forest(x, Eigen::VectorXd::Zero(20), 1);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::degenerate_supervision);
  }
  CHECK_THROWS_AS(train_forest(x, Eigen::VectorXd::Zero(19), 1), Error);
}

TEST_CASE("forest prediction is the mean of its trees") {
  std::mt19937_64 rng(6);
  auto x = random_features(rng, 150, 5);
  Eigen::VectorXd y = testing::random_unit(rng, 150).array().round();
  ForestParams p;
  p.n_trees = 20;
  auto m = train_forest(x, y, 8, p);
  const auto probe = random_features(rng, 40, 5);
  const auto curve = predict_raw(m, probe, 0.01, EdgeKind::onset);
  for (Index i = 0; i < 40; ++i) {
    double s = 0.0;
    for (const auto &t : m.trees) s += t.predict(probe.row(i).data());
    CHECK(curve.probs[i] == doctest::Approx(s / 20.0).epsilon(1e-15));
    CHECK(curve.probs[i] >= 0.0);
    CHECK(curve.probs[i] <= 1.0);
  }
  // Tree order does not matter.
  auto reversed = m;
  std::reverse(reversed.trees.begin(), reversed.trees.end());
  CHECK((forest_predict(reversed, probe) - curve.probs).cwiseAbs().maxCoeff() < 1e-15);
  // One tree: its own output.
  ForestModel one = m;
  one.trees.resize(1);
  for (Index i = 0; i < 40; ++i)
    CHECK(forest_predict(one, probe)[i] == m.trees[0].predict(probe.row(i).data()));
  // Wrong width.
  CHECK_THROWS_AS(forest_predict(m, random_features(rng, 3, 4)), Error);
}

TEST_CASE("a model whose leaves are all zero yields a zero curve") {
  // Single-class targets cannot be trained, so the all-zero model is built
  // directly.
  ForestModel m;
  m.feature_dim = 3;
  RegressionTree leaf;
  leaf.nodes.push_back(TreeNode{});
  m.trees.assign(5, leaf);
  std::mt19937_64 rng(7);
  const auto curve = predict_raw(m, random_features(rng, 30, 3), 0.01, EdgeKind::offset);
  CHECK(curve.probs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(curve.kind == EdgeKind::offset);
}

TEST_CASE("forest predictions stay within the training target range") {
  std::mt19937_64 rng(8);
  auto x = random_features(rng, 100, 4);
  Eigen::VectorXd y = 0.2 + 0.5 * testing::random_unit(rng, 100).array();
  const auto m = train_forest(x, y, 3);
  const auto p = forest_predict(m, random_features(rng, 200, 4));
  CHECK(p.minCoeff() >= y.minCoeff());
  CHECK(p.maxCoeff() <= y.maxCoeff());
}

TEST_CASE("sharpener least squares") {
  std::mt19937_64 rng(9);
  SUBCASE("raw equal to labels leaves zero residual") {
    Eigen::VectorXd lab = testing::random_unit(rng, 120).array().round();
    const auto m = train_sharpener(curve_of(lab), lab, 11);
    CHECK(sharpener_objective(m, lab, lab) < 1e-18);
    CHECK(sharpener_objective(SharpenerModel::identity(11), lab, lab) == 0.0);
  }
  SUBCASE("all-zero labels give the zero model") {
    const Eigen::VectorXd raw = testing::random_unit(rng, 80);
    const auto m = train_sharpener(curve_of(raw), Eigen::VectorXd::Zero(80), 11);
    CHECK(m.weights.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(m.bias) < 1e-12);
  }
  SUBCASE("matches a dense least-squares solve") {
    const Eigen::VectorXd raw = testing::random_unit(rng, 200);
    const Eigen::VectorXd lab = testing::random_unit(rng, 200).array().round();
    const auto m = train_sharpener(curve_of(raw), lab, 11);
    Eigen::MatrixXd a(200, 12);
    for (Index t = 0; t < 200; ++t) {
      a(t, 0) = 1.0;
      for (Index k = -5; k <= 5; ++k)
        a(t, 6 + k) = (t + k >= 0 && t + k < 200) ? raw[t + k] : 0.0;
    }
    const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(lab);
    const double oracle = (a * beta - lab).squaredNorm();
    CHECK(sharpener_objective(m, raw, lab) == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(sharpener_objective(m, raw, lab) <=
          sharpener_objective(SharpenerModel::identity(11), raw, lab) + 1e-12);
  }
  SUBCASE("constant raw curve falls back to the minimum-norm solution") {
    const Eigen::VectorXd raw = Eigen::VectorXd::Constant(60, 0.3);
    const Eigen::VectorXd lab = testing::random_unit(rng, 60).array().round();
    SharpenerModel m;
    CHECK_NOTHROW(m = train_sharpener(curve_of(raw), lab, 11));
    CHECK(m.weights.allFinite());
    CHECK(std::isfinite(m.bias));
  }
  CHECK_THROWS_AS(train_sharpener(curve_of(Eigen::VectorXd::Zero(5)), Eigen::VectorXd::Zero(5), 4),
                  Error);
  CHECK_THROWS_AS(train_sharpener(curve_of(Eigen::VectorXd::Zero(5)), Eigen::VectorXd::Zero(6), 3),
                  Error);
}

TEST_CASE("sharpen applies the window and clamps") {
  std::mt19937_64 rng(10);
  const Eigen::VectorXd raw = testing::random_unit(rng, 40);
  const auto id = sharpen(SharpenerModel::identity(11), curve_of(raw));
  CHECK((id.probs.array() == raw.array()).all());

  SharpenerModel neg = SharpenerModel::identity(3);
  neg.weights.setZero();
  neg.bias = -0.2;
  CHECK(sharpen(neg, curve_of(raw)).probs.cwiseAbs().maxCoeff() == 0.0);

  SharpenerModel m;
  m.weights = 2.0 * testing::random_unit(rng, 5).array() - 1.0;
  m.bias = 0.1;
  const auto resp = sharpener_response(m, raw);
  const auto out = sharpen(m, curve_of(raw));
  for (Index t = 0; t < 40; ++t) {
    double v = m.bias;
    for (Index k = -2; k <= 2; ++k)
      if (t + k >= 0 && t + k < 40) v += m.weights[2 + k] * raw[t + k];
    CHECK(resp[t] == doctest::Approx(v).epsilon(1e-14));
    CHECK(out.probs[t] == std::clamp(resp[t], 0.0, 1.0));
  }
  // Clamping is idempotent.
  Eigen::VectorXd clamped = out.probs.cwiseMax(0.0).cwiseMin(1.0);
  CHECK((clamped.array() == out.probs.array()).all());
}
