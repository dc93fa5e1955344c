// odo/src/metrics.cpp

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

#include "odo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "odo/error.hpp"

namespace odo {

namespace {

constexpr double kSlack = 1e-9;

// Minimum-cost assignment of every row to a distinct column (rows <= cols).
// Returns the column of each row.
std::vector<int> hungarian(const std::vector<std::vector<double>> &cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n ? static_cast<int>(cost[0].size()) : 0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t(0));
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

bool admissible(const Event &estimated, const Event &truth,
                const MatchConfig &cfg) {
  return std::abs(estimated.onset_seconds - truth.onset_seconds) <=
             cfg.onset_tolerance_seconds + kSlack &&
         std::abs(estimated.duration_seconds - truth.duration_seconds) <=
             cfg.duration_ratio_tolerance * truth.duration_seconds + kSlack;
}

std::vector<MatchPair> match_events(const Transcript &estimated,
                                    const Transcript &truth,
                                    const MatchConfig &cfg) {
  const std::size_t ne = estimated.size(), ng = truth.size();
  if (ne == 0 || ng == 0) return {};

  // Candidate edges via onset order; only nearby onsets can be admissible.
  std::vector<std::size_t> eo(ne), go(ng);
  std::iota(eo.begin(), eo.end(), std::size_t(0));
  std::iota(go.begin(), go.end(), std::size_t(0));
  std::sort(eo.begin(), eo.end(), [&](std::size_t a, std::size_t b) {
    return estimated.events[a].onset_seconds < estimated.events[b].onset_seconds;
  });
  std::sort(go.begin(), go.end(), [&](std::size_t a, std::size_t b) {
    return truth.events[a].onset_seconds < truth.events[b].onset_seconds;
  });
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t lo = 0;
  const double reach = cfg.onset_tolerance_seconds + kSlack;
  for (std::size_t ei : eo) {
    const double onset = estimated.events[ei].onset_seconds;
    while (lo < ng && truth.events[go[lo]].onset_seconds < onset - reach) ++lo;
    for (std::size_t k = lo; k < ng; ++k) {
      const std::size_t gi = go[k];
      if (truth.events[gi].onset_seconds > onset + reach) break;
      if (admissible(estimated.events[ei], truth.events[gi], cfg))
        edges.emplace_back(ei, gi);
    }
  }
  if (edges.empty()) return {};

  // Solve each connected component of the admissibility graph separately.
  UnionFind uf(ne + ng);
  for (auto [e, g] : edges) uf.unite(e, ne + g);
  std::vector<std::vector<std::size_t>> comp_est(ne + ng), comp_truth(ne + ng);
  std::vector<char> touched(ne + ng, 0);
  for (auto [e, g] : edges) {
    touched[e] = 1;
    touched[ne + g] = 1;
  }
  for (std::size_t e = 0; e < ne; ++e)
    if (touched[e]) comp_est[uf.find(e)].push_back(e);
  for (std::size_t g = 0; g < ng; ++g)
    if (touched[ne + g]) comp_truth[uf.find(ne + g)].push_back(g);

  std::vector<MatchPair> pairs;
  for (std::size_t root = 0; root < ne + ng; ++root) {
    auto &ce = comp_est[root];
    auto &cg = comp_truth[root];
    if (ce.empty() || cg.empty()) continue;
    const bool transpose = ce.size() > cg.size();
    const auto &rows = transpose ? cg : ce;
    const auto &cols = transpose ? ce : cg;
    const double big = 2.0 + double(rows.size() + 1) * (reach + 1.0);
    std::vector<std::vector<double>> cost(rows.size(),
                                          std::vector<double>(cols.size(), big));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const std::size_t e = transpose ? cols[c] : rows[r];
        const std::size_t g = transpose ? rows[r] : cols[c];
        if (admissible(estimated.events[e], truth.events[g], cfg))
          cost[r][c] = std::abs(estimated.events[e].onset_seconds -
                                truth.events[g].onset_seconds);
      }
    }
    const std::vector<int> assign = hungarian(cost);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int c = assign[r];
      if (c < 0 || cost[r][c] >= big) continue;
      const std::size_t e = transpose ? cols[c] : rows[r];
      const std::size_t g = transpose ? rows[r] : cols[c];
      pairs.push_back({e, g});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchPair &a, const MatchPair &b) {
    return a.truth < b.truth;
  });
  return pairs;
}

PrfScore f_measure(std::size_t n_matched, std::size_t n_estimated,
                   std::size_t n_truth) {
  PrfScore s;
  s.precision = n_estimated ? double(n_matched) / double(n_estimated) : 0.0;
  s.recall = n_truth ? double(n_matched) / double(n_truth) : 0.0;
  const double sum = s.precision + s.recall;
  s.f_measure = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

PrfScore score_transcript(const Transcript &estimated, const Transcript &truth,
                          const MatchConfig &cfg) {
  return f_measure(match_events(estimated, truth, cfg).size(), estimated.size(),
                   truth.size());
}

double rms_count_error(std::span<const double> estimates,
                       std::span<const double> truths) {
  if (estimates.size() != truths.size())
    throw Error(Errc::dimension_mismatch,
                "rms_count_error: " + std::to_string(estimates.size()) +
                    " estimates vs " + std::to_string(truths.size()) + " truths");
  if (estimates.empty())
    throw Error(Errc::invalid_argument, "rms_count_error: no windows");
  double ss = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i];
    ss += d * d;
  }
  return std::sqrt(ss / double(estimates.size()));
}

std::vector<CountWindow> count_windows(double total_seconds,
                                       double window_seconds) {
  if (!(window_seconds > 0.0))
    throw Error(Errc::invalid_argument, "count window must be positive");
  std::vector<CountWindow> windows;
  for (Index k = 0;; ++k) {
    const double start = double(k) * window_seconds;
    if (start >= total_seconds - 1e-9) break;
    windows.push_back({start, std::min(total_seconds, start + window_seconds)});
  }
  return windows;
}

std::vector<double> count_onsets(const Transcript &transcript,
                                 std::span<const CountWindow> windows) {
  std::vector<double> counts(windows.size(), 0.0);
  for (const Event &e : transcript.events)
    for (std::size_t w = 0; w < windows.size(); ++w)
      if (e.onset_seconds >= windows[w].start_seconds &&
          e.onset_seconds < windows[w].end_seconds) {
        counts[w] += 1.0;
        break;
      }
  return counts;
}

}  // namespace odo
