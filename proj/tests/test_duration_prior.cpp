// odo/tests/test_duration_prior.cpp

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

#include <cmath>
#include <numbers>
#include <random>

#include "odo/duration_prior.hpp"
#include "odo/error.hpp"
#include "oracles.hpp"

using namespace odo;

namespace {

constexpr double kHop = 1024.0 / 96000.0;

bool non_decreasing(const std::vector<double> &trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] < trace[i - 1] - 1e-9 * std::max(1.0, std::abs(trace[i - 1]))) return false;
  return true;
}

}  // namespace

TEST_CASE("point-mass durations give one floored component") {
  const std::vector<double> d(40, 0.1);
  testing::WarningCapture w;
  const auto p = fit_duration_gmm(d, 1, 1, kHop);
  REQUIRE(p.components.size() == 1);
  CHECK(p.components[0].mean_seconds == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(p.components[0].std_seconds == doctest::Approx(kHop / 2).epsilon(1e-12));
  CHECK(p.kind == PriorKind::gmm);
  // Asking for more components than distinct values collapses to one.
  const auto q = fit_duration_gmm(d, 3, 1, kHop);
  CHECK(q.components.size() == 1);
  CHECK_FALSE(w.messages().empty());
}

TEST_CASE("two separated clusters are recovered") {
  std::vector<double> d;
  for (int i = 0; i < 50; ++i) d.push_back(0.05);
  for (int i = 0; i < 50; ++i) d.push_back(0.20);
  std::vector<double> trace;
  const auto p = fit_duration_gmm(d, 2, 5, kHop, 0.25, &trace);
  REQUIRE(p.components.size() == 2);
  std::vector<double> means{p.components[0].mean_seconds, p.components[1].mean_seconds};
  std::sort(means.begin(), means.end());
  CHECK(std::abs(means[0] - 0.05) < 1e-3);
  CHECK(std::abs(means[1] - 0.20) < 1e-3);
  // Fixed point: responsibilities computed directly reproduce the means.
  double num0 = 0, den0 = 0;
  for (double x : d) {
    double r[2];
    for (int c = 0; c < 2; ++c) {
      const auto &k = p.components[c];
      r[c] = k.weight * std::exp(-0.5 * std::pow((x - k.mean_seconds) / k.std_seconds, 2)) /
             k.std_seconds;
    }
    num0 += r[0] / (r[0] + r[1]) * x;
    den0 += r[0] / (r[0] + r[1]);
  }
  CHECK(num0 / den0 == doctest::Approx(p.components[0].mean_seconds).epsilon(1e-9));
  CHECK(non_decreasing(trace));
}

TEST_CASE("duration EM log-likelihood never decreases") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> ln(std::log(0.1), 0.4);
    std::vector<double> d(150);
    for (auto &x : d) x = ln(rng);
    std::vector<double> trace;
    fit_duration_gmm(d, 3, seed, kHop, 0.25, &trace);
    CHECK(trace.size() >= 2);
    CHECK(non_decreasing(trace));
  }
}

TEST_CASE("fitting is deterministic and scale-equivariant") {
  std::mt19937_64 rng(3);
  std::vector<double> d;
  std::normal_distribution<double> a(0.08, 0.01), b(0.25, 0.02);
  for (int i = 0; i < 60; ++i) d.push_back(a(rng));
  for (int i = 0; i < 60; ++i) d.push_back(b(rng));
  const auto p1 = fit_duration_gmm(d, 2, 9, 0.001);
  const auto p2 = fit_duration_gmm(d, 2, 9, 0.001);
  REQUIRE(p1.components.size() == p2.components.size());
  for (std::size_t i = 0; i < p1.components.size(); ++i) {
    CHECK(p1.components[i].mean_seconds == p2.components[i].mean_seconds);
    CHECK(p1.components[i].std_seconds == p2.components[i].std_seconds);
  }
  CHECK((p1.pmf.array() == p2.pmf.array()).all());

  std::vector<double> scaled = d;
  for (auto &x : scaled) x *= 2.0;
  const auto ps = fit_duration_gmm(scaled, 2, 9, 0.002);
  std::vector<double> m1, m2;
  for (const auto &c : p1.components) m1.push_back(c.mean_seconds);
  for (const auto &c : ps.components) m2.push_back(c.mean_seconds);
  std::sort(m1.begin(), m1.end());
  std::sort(m2.begin(), m2.end());
  for (std::size_t i = 0; i < m1.size(); ++i) CHECK(m2[i] == doctest::Approx(2 * m1[i]).epsilon(1e-5));
}

TEST_CASE("fewer durations than components reduces the count") {
  testing::WarningCapture w;
  const std::vector<double> d{0.05, 0.2};
  const auto p = fit_duration_gmm(d, 3, 1, kHop);
  CHECK(p.components.size() == 2);
  CHECK_FALSE(w.messages().empty());
  CHECK_THROWS_AS(fit_duration_gmm(std::vector<double>{0.1, -0.1}, 1, 1, kHop), Error);
}

TEST_CASE("flat priors") {
  const auto one = flat_prior(3, 3);
  CHECK(eval_prior(one, 3) == 1.0);
  CHECK(eval_prior(one, 2) == 0.0);
  const auto four = flat_prior(1, 4);
  for (Index t = 1; t <= 4; ++t) CHECK(eval_prior(four, t) == 0.25);
  CHECK(eval_prior(four, 0) == 0.0);
  CHECK(eval_prior(four, 5) == 0.0);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> u(1, 80);
  for (int i = 0; i < 50; ++i) {
    int a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const auto p = flat_prior(a, b);
    CHECK(std::abs(p.pmf.sum() - 1.0) <= 1e-9);
  }
  CHECK_THROWS_AS(flat_prior(5, 4), Error);
  CHECK_THROWS_AS(flat_prior(0, 4), Error);
}

TEST_CASE("GMM prior pmf") {
  std::vector<DurationComponent> comps{{1.0, 0.1, 0.02}};
  const auto pmf = discretise_gmm(comps, 2, 20, kHop);
  CHECK(std::abs(pmf.sum() - 1.0) <= 1e-9);
  Index arg;
  pmf.maxCoeff(&arg);
  // Grid-evaluated Gaussian density oracle.
  Index best = 2;
  double best_v = -1;
  for (Index t = 2; t <= 20; ++t) {
    const double v = std::exp(-0.5 * std::pow((t * kHop - 0.1) / 0.02, 2));
    if (v > best_v) best_v = v, best = t;
  }
  CHECK(arg + 2 == best);
  CHECK(best == Index(std::lround(0.1 / kHop)));

  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> ln(std::log(0.1), 0.3);
  std::vector<double> d(100);
  for (auto &x : d) x = ln(rng);
  const auto p = fit_duration_gmm(d, 3, 1, kHop);
  double sum = 0.0;
  for (Index t = p.tau_min; t <= p.tau_max; ++t) sum += eval_prior(p, t);
  CHECK(std::abs(sum - 1.0) <= 1e-9);
  CHECK(eval_prior(p, p.tau_min - 1) == 0.0);
  CHECK(eval_prior(p, p.tau_max + 1) == 0.0);
  double sum_other = 0.0;
  for (Index t = p.tau_min; t <= p.tau_max; ++t) sum_other += eval_prior(p, t, kHop / 2);
  CHECK(std::abs(sum_other - 1.0) <= 1e-9);
  CHECK(eval_prior(p, p.tau_min + 3, kHop) == eval_prior(p, p.tau_min + 3));
}

TEST_CASE("duration range is the observed range widened by a quarter") {
  const std::vector<double> d{0.05, 0.1, 0.2};
  const auto [lo, hi] = duration_range_frames(d, 0.01);
  CHECK(lo == 3);   // floor(0.75 * 5)
  CHECK(hi == 25);  // ceil(1.25 * 20)
  const std::vector<double> tiny{0.001};
  CHECK(duration_range_frames(tiny, 0.01).first == 1);
}
