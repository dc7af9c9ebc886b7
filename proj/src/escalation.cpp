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

#include "judgekit/escalation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "judgekit/errors.hpp"
#include "judgekit/kernels.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/stats.hpp"

namespace judgekit {
namespace {

void require_nonempty(std::span<const PairedScores> pairs, const char* what) {
  if (pairs.empty()) fail(ErrorCode::kDomain, std::string(what) + " is empty");
}

std::vector<double> sorted_unique_mini_stds(std::span<const PairedScores> pairs) {
  std::vector<double> v;
  v.reserve(pairs.size() * kResponsesPerExample);
  for (const PairedScores& p : pairs) {
    for (double s : p.mini.stds()) v.push_back(s);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double ratio(std::int64_t num, std::size_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void validate(const PairedScores& pair) {
  if (pair.mini.example_id() != pair.example_id ||
      pair.full.example_id() != pair.example_id) {
    fail(ErrorCode::kValidation,
         "paired scores refer to different examples ('" + pair.mini.example_id() +
             "' vs '" + pair.full.example_id() + "')");
  }
  if (pair.mini.k() < 2 || pair.full.k() < 2) {
    fail(ErrorCode::kValidation,
         "paired scores for '" + pair.example_id + "' need k >= 2 on both models");
  }
}

void validate(const RoutingConfig& config) {
  if (!(config.sigma1 < config.sigma2)) {
    fail(ErrorCode::kDomain, "routing config needs sigma1 < sigma2");
  }
  if (config.n_max < 1) fail(ErrorCode::kDomain, "n_max must be >= 1");
  if (config.steepness != kBlendSteepness) {
    fail(ErrorCode::kDomain, "blend steepness is fixed at 10");
  }
  if (!(config.theta >= 0.0)) fail(ErrorCode::kDomain, "theta must be >= 0");
  if (config.budget && *config.budget < 1.0) {
    fail(ErrorCode::kDomain, "budget below one call per response is infeasible");
  }
}

HardRoute hard_route(const PairedScores& pair, double theta) {
  if (!(theta >= 0.0)) fail(ErrorCode::kDomain, "theta must be >= 0");
  HardRoute out;
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    out.escalated[i] = pair.mini.stds()[i] >= theta;
    out.effective_means[i] =
        out.escalated[i] ? pair.full.means()[i] : pair.mini.means()[i];
  }
  return out;
}

double escalation_cost(double c_mini, double c_full, double p_esc) {
  if (!(p_esc >= 0.0 && p_esc <= 1.0)) {
    fail(ErrorCode::kDomain, "p_esc must be in [0, 1]");
  }
  if (c_mini < 0.0 || c_full < 0.0) {
    fail(ErrorCode::kDomain, "costs must be non-negative");
  }
  return c_mini + p_esc * c_full;
}

double sigmoid_weight(double sigma, double midpoint) {
  return 1.0 / (1.0 + std::exp(-kBlendSteepness * (sigma - midpoint)));
}

std::array<double, kResponsesPerExample> soft_blend(const PairedScores& pair,
                                                    double midpoint) {
  std::array<double, kResponsesPerExample> out;
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    const double w = sigmoid_weight(pair.mini.stds()[i], midpoint);
    out[i] = (1.0 - w) * pair.mini.means()[i] + w * pair.full.means()[i];
  }
  return out;
}

int variance_informed_n(double sigma, const RoutingConfig& config) {
  if (sigma <= config.sigma1) return 1;
  if (sigma >= config.sigma2) return config.n_max;
  const double raw = 1.0 + (sigma - config.sigma1) * (config.n_max - 1) /
                               (config.sigma2 - config.sigma1);
  const int n = static_cast<int>(std::floor(raw + 0.5));
  return std::clamp(n, 1, config.n_max);
}

Verdict adaptive_verdict(const PairedScores& pair,
                         const std::array<int, kResponsesPerExample>& n_full) {
  std::array<std::int64_t, kResponsesPerExample> sums{};
  std::array<std::int64_t, kResponsesPerExample> counts{};
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    const int n = std::min(n_full[i], pair.full.k());
    if (n < 1) fail(ErrorCode::kDomain, "adaptive call count must be >= 1");
    const auto& row = pair.full.row(i);
    for (int s = 0; s < n; ++s) sums[i] += row[s];
    counts[i] = n;
  }
  Verdict v = pick_winner_exact(sums, counts, pair.chosen_index);
  v.example_id = pair.example_id;
  return v;
}

std::vector<HardSweepPoint> sweep_hard_threshold(std::span<const PairedScores> pairs,
                                                 const CostInputs& cost) {
  require_nonempty(pairs, "pair list");
  std::vector<double> thetas = {0.0};
  for (double s : sorted_unique_mini_stds(pairs)) {
    if (s > 0.0) thetas.push_back(s);
  }
  thetas.push_back(std::numeric_limits<double>::infinity());

  const auto counts = kernels::hard_sweep_parallel(pairs, thetas);
  const auto responses = pairs.size() * kResponsesPerExample;
  std::vector<HardSweepPoint> out;
  out.reserve(thetas.size());
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    HardSweepPoint p;
    p.theta = thetas[t];
    p.accuracy = ratio(counts[t].correct, pairs.size());
    p.p_esc = ratio(counts[t].escalated, responses);
    p.cost = escalation_cost(cost.mini_per_example, cost.full_per_example(), p.p_esc);
    out.push_back(p);
  }
  return out;
}

std::vector<BlendPoint> sweep_blend(std::span<const PairedScores> pairs,
                                    std::span<const double> grid) {
  require_nonempty(pairs, "pair list");
  const auto counts = kernels::blend_sweep_parallel(pairs, grid);
  std::vector<BlendPoint> out;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    out.push_back({grid[m], ratio(counts[m].correct, pairs.size()),
                   counts[m].weight_sum /
                       static_cast<double>(pairs.size() * kResponsesPerExample)});
  }
  return out;
}

BlendFit fit_blend_midpoint(std::span<const PairedScores> train,
                            std::span<const PairedScores> test) {
  require_nonempty(train, "training split");
  require_nonempty(test, "test split");
  const std::vector<double> grid = sorted_unique_mini_stds(train);
  BlendFit fit;
  fit.train_curve = sweep_blend(train, grid);
  std::size_t best = 0;
  for (std::size_t m = 1; m < fit.train_curve.size(); ++m) {
    // Strict improvement only: ties keep the smaller midpoint.
    if (fit.train_curve[m].accuracy > fit.train_curve[best].accuracy) best = m;
  }
  fit.midpoint = fit.train_curve[best].midpoint;
  fit.train_accuracy = fit.train_curve[best].accuracy;
  const double mid[] = {fit.midpoint};
  fit.test_accuracy = sweep_blend(test, mid).front().accuracy;
  return fit;
}

std::vector<std::pair<double, double>> adaptive_grid(
    std::span<const PairedScores> train) {
  require_nonempty(train, "training split");
  std::vector<double> stds;
  for (const PairedScores& p : train) {
    for (double s : p.mini.stds()) stds.push_back(s);
  }
  std::sort(stds.begin(), stds.end());
  std::vector<double> anchors;
  for (int pct = 15; pct <= 95; pct += 5) {
    anchors.push_back(quantile_sorted(stds, pct / 100.0));
  }
  std::vector<std::pair<double, double>> grid;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    for (std::size_t b = a + 1; b < anchors.size(); ++b) {
      if (anchors[a] < anchors[b]) grid.emplace_back(anchors[a], anchors[b]);
    }
  }
  // Every response at or below the largest observed std gets one call.
  grid.emplace_back(stds.back(), stds.back() + 1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

AdaptiveFit grid_search_adaptive(std::span<const PairedScores> train,
                                 std::span<const PairedScores> test, int n_max,
                                 std::optional<double> budget) {
  require_nonempty(train, "training split");
  require_nonempty(test, "test split");
  if (n_max < 1) fail(ErrorCode::kDomain, "n_max must be >= 1");
  if (budget && !(*budget >= 1.0)) {
    fail(ErrorCode::kDomain, "budget below one call per response is infeasible");
  }

  const auto grid = adaptive_grid(train);
  const auto counts = kernels::adaptive_sweep_parallel(train, grid, n_max);
  const auto responses = static_cast<std::int64_t>(train.size() * kResponsesPerExample);

  AdaptiveFit fit;
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double acc = ratio(counts[c].correct, train.size());
    const double mean_n = ratio(counts[c].total_calls, responses);
    fit.train_grid.push_back({grid[c].first, grid[c].second, acc, mean_n});
    if (budget && mean_n > *budget) continue;
    if (!best) {
      best = c;
      continue;
    }
    const auto& cur = counts[*best];
    if (counts[c].correct > cur.correct ||
        (counts[c].correct == cur.correct && counts[c].total_calls < cur.total_calls)) {
      best = c;
    }
  }
  // The one-call configuration always satisfies budget >= 1.
  const auto& winner = grid[*best];
  fit.sigma1 = winner.first;
  fit.sigma2 = winner.second;
  fit.train_accuracy = fit.train_grid[*best].accuracy;
  fit.mean_n_full = fit.train_grid[*best].mean_n_full;

  const std::pair<double, double> chosen[] = {winner};
  const auto test_counts = kernels::adaptive_sweep_parallel(test, chosen, n_max);
  fit.test_accuracy = ratio(test_counts[0].correct, test.size());
  fit.test_mean_n_full = ratio(test_counts[0].total_calls,
                               test.size() * kResponsesPerExample);
  return fit;
}

double adaptive_cost(std::span<const PairedScores> pairs, const RoutingConfig& config,
                     const CostInputs& cost) {
  require_nonempty(pairs, "pair list");
  std::int64_t calls = 0;
  for (const PairedScores& p : pairs) {
    for (double s : p.mini.stds()) calls += variance_informed_n(s, config);
  }
  const double per_example_calls = ratio(calls, pairs.size());
  return cost.mini_per_example +
         static_cast<double>(kResponsesPerExample) * cost.full_input_per_response +
         per_example_calls * cost.full_output_per_completion;
}

Split split_pairs(std::span<const PairedScores> pairs, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    fail(ErrorCode::kDomain, "train_fraction must be in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int key = spec.stratify_by_category ? static_cast<int>(pairs[i].category) : 0;
    groups[key].push_back(i);
  }
  Rng rng(spec.seed);
  std::vector<bool> in_train(pairs.size(), false);
  for (auto& [key, idx] : groups) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.below(i)]);
    }
    const auto n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(idx.size()) + 0.5));
    for (std::size_t t = 0; t < n_train && t < idx.size(); ++t) in_train[idx[t]] = true;
  }
  Split split;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (in_train[i] ? split.train : split.test).push_back(pairs[i]);
  }
  return split;
}

std::vector<ConvergencePoint> convergence_curve(std::span<const PairedScores> pairs,
                                                int k_max) {
  require_nonempty(pairs, "pair list");
  std::vector<ConvergencePoint> out;
  for (int j = 1; j <= k_max; ++j) {
    std::vector<Verdict> mini, full;
    std::vector<std::array<double, 4>> mini_means, full_means;
    for (const PairedScores& p : pairs) {
      const ScoreMatrix m = p.mini.prefix(j);
      const ScoreMatrix f = p.full.prefix(j);
      mini.push_back(judge_example(m, p.chosen_index));
      full.push_back(judge_example(f, p.chosen_index));
      mini_means.push_back(m.means());
      full_means.push_back(f.means());
    }
    const MeanSpearman rho = mean_spearman(mini_means, full_means);
    out.push_back({j, agreement(mini, full), rho.mean, rho.excluded});
  }
  return out;
}

VarianceDiagnostics variance_diagnostics(std::span<const PairedScores> pairs) {
  require_nonempty(pairs, "pair list");
  std::vector<double> mini_std, full_std, example_std, correct;
  std::vector<std::uint8_t> wrong;
  for (const PairedScores& p : pairs) {
    double total = 0.0;
    for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
      mini_std.push_back(p.mini.stds()[i]);
      full_std.push_back(p.full.stds()[i]);
      total += p.mini.stds()[i];
    }
    example_std.push_back(total / kResponsesPerExample);
    const bool ok = judge_example(p.mini, p.chosen_index).correct;
    correct.push_back(ok ? 1.0 : 0.0);
    wrong.push_back(ok ? 0 : 1);
  }
  VarianceDiagnostics d;
  d.mini_full_std_pearson = pearson(mini_std, full_std);
  d.mini_std_error_auc = auc(example_std, wrong);
  d.mini_std_correct_pearson = pearson(example_std, correct);
  return d;
}

}  // namespace judgekit
