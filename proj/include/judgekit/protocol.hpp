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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "judgekit/dataset.hpp"
#include "judgekit/scoring.hpp"

namespace judgekit {

struct Verdict {
  std::string example_id;
  std::optional<int> winner;  // nullopt: the maximum is shared (tie)
  bool correct = false;
  // Top mean minus runner-up mean; 0 for ties. Diagnostic only.
  double winner_margin = 0.0;

  bool tie() const { return !winner.has_value(); }
};

// Unique strict maximum wins; any shared maximum is a tie and incorrect.
// Throws Error(kDomain) for non-finite means or chosen_index outside [0, 3].
Verdict pick_winner(const std::array<double, kResponsesPerExample>& means,
                    int chosen_index);

// Exact version for means represented as sum/count pairs. Ties are decided
// by integer cross-multiplication, never by floating comparison.
Verdict pick_winner_exact(const std::array<std::int64_t, kResponsesPerExample>& sums,
                          const std::array<std::int64_t, kResponsesPerExample>& counts,
                          int chosen_index);

Verdict judge_example(const ScoreMatrix& matrix, int chosen_index);

struct ConditionMetrics {
  double accuracy = 0.0;
  double tie_rate = 0.0;
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t ties = 0;
};

// Throws Error(kDomain) on an empty list.
ConditionMetrics condition_metrics(std::span<const Verdict> verdicts);

// A matrix paired with the index of the response known to be best.
struct JudgedMatrix {
  ScoreMatrix matrix;
  int chosen_index = 0;
};

// Accuracy using only the first j samples of every row.
// Throws Error(kDomain) unless 1 <= j <= k for every matrix.
double accuracy_at_prefix_k(std::span<const JudgedMatrix> matrices, int j);
ConditionMetrics metrics_at_prefix_k(std::span<const JudgedMatrix> matrices, int j);

enum class CurveMode {
  kPrefix,       // one k_max collection, re-derived means per j
  kIndependent,  // one collection per k
};

struct CurvePoint {
  int k = 0;
  ConditionMetrics metrics;
};

// kPrefix: points j = 1..k_max from one collection.
std::vector<CurvePoint> ensemble_curve(std::span<const JudgedMatrix> matrices,
                                       int k_max);
// kIndependent: each entry is a separate collection at its own k.
std::vector<CurvePoint> ensemble_curve_independent(
    std::span<const std::vector<JudgedMatrix>> collections);

}  // namespace judgekit
