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
#include <vector>

#include "judgekit/protocol.hpp"

namespace judgekit {

inline constexpr int kDefaultResamples = 2000;

struct BootstrapResult {
  double point_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double half_width = 0.0;
  int n_resamples = 0;
  std::uint64_t seed = 0;
};

// Percentile bootstrap of the mean of 0/1 flags. Resample r draws its indices
// from a stream seeded by (seed, r), so the result does not depend on how
// resamples are scheduled across threads.
BootstrapResult bootstrap_ci(std::span<const std::uint8_t> flags,
                             int n_resamples = kDefaultResamples,
                             double level = 0.95, std::uint64_t seed = 0);

struct ComparisonResult {
  double p_a_gt_b = 0.0;
  int n_resamples = 0;
  std::uint64_t seed = 0;
};

// Fraction of paired resamples where accuracy(a) strictly exceeds
// accuracy(b). Throws Error(kDomain) on length mismatch or empty input.
ComparisonResult paired_bootstrap(std::span<const std::uint8_t> flags_a,
                                  std::span<const std::uint8_t> flags_b,
                                  int n_resamples = kDefaultResamples,
                                  std::uint64_t seed = 0);

// Linear-interpolation quantile of sorted data (h = (n - 1) * q).
double quantile_sorted(std::span<const double> sorted, double q);

// Fraction of examples where both verdicts name the same unique winner. A tie
// on either side is a disagreement.
double agreement(std::span<const Verdict> a, std::span<const Verdict> b);

// Spearman correlation of two 4-vectors with average ranks for ties;
// nullopt when either vector is constant.
std::optional<double> spearman_4(const std::array<double, 4>& a,
                                 const std::array<double, 4>& b);

struct MeanSpearman {
  double mean = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

MeanSpearman mean_spearman(std::span<const std::array<double, 4>> a,
                           std::span<const std::array<double, 4>> b);

// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 * P(equal).
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace judgekit
