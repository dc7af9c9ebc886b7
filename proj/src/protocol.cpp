// Copyright 2026 The judgekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "judgekit/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "judgekit/errors.hpp"
#include "judgekit/kernels.hpp"

namespace judgekit {
namespace {

void check_chosen(int chosen_index) {
  if (chosen_index < 0 || chosen_index >= static_cast<int>(kResponsesPerExample)) {
    fail(ErrorCode::kDomain, "chosen_index outside [0, 3]");
  }
}

}  // namespace

Verdict pick_winner(const std::array<double, kResponsesPerExample>& means,
                    int chosen_index) {
  check_chosen(chosen_index);
  for (double m : means) {
    if (!std::isfinite(m)) fail(ErrorCode::kDomain, "non-finite mean score");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < kResponsesPerExample; ++i) {
    if (means[i] > means[best]) best = i;
  }
  int at_max = 0;
  double runner_up = -INFINITY;
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    if (means[i] == means[best]) {
      ++at_max;
    } else {
      runner_up = std::max(runner_up, means[i]);
    }
  }
  Verdict v;
  if (at_max == 1) {
    v.winner = static_cast<int>(best);
    v.correct = v.winner == chosen_index;
    v.winner_margin = means[best] - runner_up;
  }
  return v;
}

Verdict pick_winner_exact(const std::array<std::int64_t, kResponsesPerExample>& sums,
                          const std::array<std::int64_t, kResponsesPerExample>& counts,
                          int chosen_index) {
  check_chosen(chosen_index);
  for (auto c : counts) {
    if (c <= 0) fail(ErrorCode::kDomain, "mean over an empty row");
  }
  // a/b vs c/d with positive b, d.
  auto cmp = [&](std::size_t a, std::size_t b) {
    const std::int64_t lhs = sums[a] * counts[b];
    const std::int64_t rhs = sums[b] * counts[a];
    return (lhs > rhs) - (lhs < rhs);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < kResponsesPerExample; ++i) {
    if (cmp(i, best) > 0) best = i;
  }
  int at_max = 0;
  std::optional<std::size_t> second;
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    if (cmp(i, best) == 0) {
      ++at_max;
    } else if (!second || cmp(i, *second) > 0) {
      second = i;
    }
  }
  Verdict v;
  if (at_max == 1) {
    v.winner = static_cast<int>(best);
    v.correct = v.winner == chosen_index;
    v.winner_margin =
        static_cast<double>(sums[best]) / static_cast<double>(counts[best]) -
        static_cast<double>(sums[*second]) / static_cast<double>(counts[*second]);
  }
  return v;
}

Verdict judge_example(const ScoreMatrix& matrix, int chosen_index) {
  std::array<std::int64_t, kResponsesPerExample> counts;
  counts.fill(matrix.k());
  Verdict v = pick_winner_exact(matrix.sums(), counts, chosen_index);
  v.example_id = matrix.example_id();
  return v;
}

ConditionMetrics condition_metrics(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) {
    fail(ErrorCode::kDomain, "condition metrics need at least one verdict");
  }
  ConditionMetrics m;
  m.n = verdicts.size();
  for (const Verdict& v : verdicts) {
    m.correct += v.correct ? 1 : 0;
    m.ties += v.tie() ? 1 : 0;
  }
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.n);
  m.tie_rate = static_cast<double>(m.ties) / static_cast<double>(m.n);
  return m;
}

ConditionMetrics metrics_at_prefix_k(std::span<const JudgedMatrix> matrices,
                                     int j) {
  if (matrices.empty()) {
    fail(ErrorCode::kDomain, "prefix accuracy needs at least one matrix");
  }
  for (const JudgedMatrix& jm : matrices) {
    if (j < 1 || j > jm.matrix.k()) {
      fail(ErrorCode::kDomain, "prefix length " + std::to_string(j) +
                                   " outside [1, " +
                                   std::to_string(jm.matrix.k()) + "]");
    }
  }
  const kernels::PrefixCounts counts = kernels::prefix_counts_parallel(matrices, j);
  ConditionMetrics m;
  m.n = matrices.size();
  m.correct = counts.correct;
  m.ties = counts.ties;
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.n);
  m.tie_rate = static_cast<double>(m.ties) / static_cast<double>(m.n);
  return m;
}

double accuracy_at_prefix_k(std::span<const JudgedMatrix> matrices, int j) {
  return metrics_at_prefix_k(matrices, j).accuracy;
}

std::vector<CurvePoint> ensemble_curve(std::span<const JudgedMatrix> matrices,
                                       int k_max) {
  std::vector<CurvePoint> curve;
  for (int j = 1; j <= k_max; ++j) {
    curve.push_back({j, metrics_at_prefix_k(matrices, j)});
  }
  return curve;
}

std::vector<CurvePoint> ensemble_curve_independent(
    std::span<const std::vector<JudgedMatrix>> collections) {
  std::vector<CurvePoint> curve;
  for (const auto& collection : collections) {
    if (collection.empty()) {
      fail(ErrorCode::kDomain, "empty collection in independent curve");
    }
    const int k = collection.front().matrix.k();
    for (const JudgedMatrix& jm : collection) {
      if (jm.matrix.k() != k) {
        fail(ErrorCode::kShape, "mixed k within one collection");
      }
    }
    curve.push_back({k, metrics_at_prefix_k(collection, k)});
  }
  std::sort(curve.begin(), curve.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.k < b.k; });
  return curve;
}

}  // namespace judgekit
