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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "judgekit/dataset.hpp"
#include "judgekit/protocol.hpp"
#include "judgekit/scoring.hpp"

namespace judgekit {

// Mini and full collections of the same example.
struct PairedScores {
  std::string example_id;
  Category category = Category::kFactuality;
  ScoreMatrix mini;
  ScoreMatrix full;
  int chosen_index = 0;
};

// Throws Error(kValidation) if ids disagree or either k < 2.
void validate(const PairedScores& pair);

inline constexpr double kBlendSteepness = 10.0;

struct RoutingConfig {
  double theta = 0.0;
  double midpoint = 0.0;
  double steepness = kBlendSteepness;
  double sigma1 = 0.0;
  double sigma2 = 1.0;
  int n_max = 8;
  std::optional<double> budget;
};

void validate(const RoutingConfig& config);

struct HardRoute {
  std::array<double, kResponsesPerExample> effective_means{};
  std::array<bool, kResponsesPerExample> escalated{};
};

// Per response: full mean when the mini std is >= theta, else mini mean.
// theta may be +infinity. Throws Error(kDomain) for negative or NaN theta.
HardRoute hard_route(const PairedScores& pair, double theta);

// C = c_mini + p_esc * c_full.
double escalation_cost(double c_mini, double c_full, double p_esc);

double sigmoid_weight(double sigma, double midpoint);

std::array<double, kResponsesPerExample> soft_blend(const PairedScores& pair,
                                                    double midpoint);

// Clamped linear ramp from 1 call (sigma <= sigma1) to n_max calls
// (sigma >= sigma2), rounded half-up in between.
int variance_informed_n(double sigma, const RoutingConfig& config);

// Verdict when response i is scored by the first n[i] full-model samples.
Verdict adaptive_verdict(const PairedScores& pair,
                         const std::array<int, kResponsesPerExample>& n_full);

// Dollar inputs for the escalation cost model. The full-model cost of one
// response with n completions is input_per_response + n * output_per_completion.
struct CostInputs {
  double mini_per_example = 0.0;
  double full_input_per_response = 0.0;
  double full_output_per_completion = 0.0;
  int full_k = 8;

  // Cost of running the full model at full_k on all four responses.
  double full_per_example() const {
    return static_cast<double>(kResponsesPerExample) *
           (full_input_per_response + full_k * full_output_per_completion);
  }
};

struct HardSweepPoint {
  double theta = 0.0;
  double accuracy = 0.0;
  double cost = 0.0;
  double p_esc = 0.0;
};

// One point per unique observed mini std, plus theta = 0 and theta = +inf.
// Sorted by theta ascending.
std::vector<HardSweepPoint> sweep_hard_threshold(
    std::span<const PairedScores> pairs, const CostInputs& cost);

struct BlendPoint {
  double midpoint = 0.0;
  double accuracy = 0.0;
  double mean_weight = 0.0;
};

// Accuracy for each midpoint in `grid`.
std::vector<BlendPoint> sweep_blend(std::span<const PairedScores> pairs,
                                    std::span<const double> grid);

struct BlendFit {
  double midpoint = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::vector<BlendPoint> train_curve;
};

// Grid: sorted unique per-response mini stds on the training pairs. Ties in
// train accuracy go to the smaller midpoint.
BlendFit fit_blend_midpoint(std::span<const PairedScores> train,
                            std::span<const PairedScores> test);

struct AdaptivePoint {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double accuracy = 0.0;
  double mean_n_full = 0.0;
};

struct AdaptiveFit {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double mean_n_full = 0.0;       // train set, the constrained quantity
  double test_mean_n_full = 0.0;  // reported, not constrained
  std::vector<AdaptivePoint> train_grid;
};

// The (sigma1, sigma2) grid: every ordered pair of distinct values among the
// 15th, 20th, ..., 95th percentiles of the training mini stds, plus one
// configuration that gives every response exactly one call.
std::vector<std::pair<double, double>> adaptive_grid(
    std::span<const PairedScores> train);

// Maximizes train accuracy subject to train mean n_full <= budget (when
// given). Ties: fewer calls, then smaller sigma1, then smaller sigma2.
// Throws Error(kDomain) for n_max < 1, budget < 1, or an empty split.
AdaptiveFit grid_search_adaptive(std::span<const PairedScores> train,
                                 std::span<const PairedScores> test, int n_max,
                                 std::optional<double> budget);

double adaptive_cost(std::span<const PairedScores> pairs, const RoutingConfig& config,
                     const CostInputs& cost);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratify_by_category = true;
};

struct Split {
  std::vector<PairedScores> train;
  std::vector<PairedScores> test;
};

// Deterministic given the seed. Stratified splits take round(f * n_c)
// examples of each category into train.
Split split_pairs(std::span<const PairedScores> pairs, const SplitSpec& spec);

struct ConvergencePoint {
  int k = 0;
  double agreement = 0.0;
  double mean_spearman = 0.0;
  std::size_t spearman_excluded = 0;
};

// Mini vs full winner agreement and rank correlation using the first j
// samples of both models, for j = 1..k_max.
std::vector<ConvergencePoint> convergence_curve(std::span<const PairedScores> pairs,
                                                int k_max);

struct VarianceDiagnostics {
  double mini_full_std_pearson = 0.0;
  // AUC of the mini model's mean per-example std as a classifier of mini
  // verdict errors.
  double mini_std_error_auc = 0.5;
  double mini_std_correct_pearson = 0.0;
};

VarianceDiagnostics variance_diagnostics(std::span<const PairedScores> pairs);

}  // namespace judgekit
