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

#include "judgekit/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "judgekit/rng.hpp"

namespace judgekit::kernels {
namespace {

std::int64_t one_resample(std::span<const std::uint8_t> flags,
                          std::uint64_t seed, int r) {
  Rng rng(combine_seed(seed, static_cast<std::uint64_t>(r)));
  const std::uint64_t n = flags.size();
  std::int64_t count = 0;
  for (std::uint64_t i = 0; i < n; ++i) count += flags[rng.below(n)];
  return count;
}

bool one_paired_win(std::span<const std::uint8_t> a,
                    std::span<const std::uint8_t> b, std::uint64_t seed, int r) {
  Rng rng(combine_seed(seed, static_cast<std::uint64_t>(r)));
  const std::uint64_t n = a.size();
  std::int64_t diff = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t idx = rng.below(n);
    diff += static_cast<std::int64_t>(a[idx]) - static_cast<std::int64_t>(b[idx]);
  }
  return diff > 0;
}

void tally(const JudgedMatrix& jm, int j, PrefixCounts& counts) {
  std::array<std::int64_t, kResponsesPerExample> sums{};
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    const auto& row = jm.matrix.row(i);
    for (int s = 0; s < j; ++s) sums[i] += row[s];
  }
  std::array<std::int64_t, kResponsesPerExample> counts_per_row;
  counts_per_row.fill(j);
  const Verdict v = pick_winner_exact(sums, counts_per_row, jm.chosen_index);
  counts.correct += v.correct ? 1 : 0;
  counts.ties += v.tie() ? 1 : 0;
}

RouteCounts hard_one(std::span<const PairedScores> pairs, double theta) {
  RouteCounts out;
  for (const PairedScores& p : pairs) {
    std::array<std::int64_t, kResponsesPerExample> sums;
    std::array<std::int64_t, kResponsesPerExample> counts;
    for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
      if (p.mini.stds()[i] >= theta) {
        sums[i] = p.full.sums()[i];
        counts[i] = p.full.k();
        ++out.escalated;
      } else {
        sums[i] = p.mini.sums()[i];
        counts[i] = p.mini.k();
      }
    }
    out.correct += pick_winner_exact(sums, counts, p.chosen_index).correct;
  }
  return out;
}

BlendCounts blend_one(std::span<const PairedScores> pairs, double midpoint) {
  BlendCounts out;
  for (const PairedScores& p : pairs) {
    std::array<double, kResponsesPerExample> means;
    for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
      const double w = sigmoid_weight(p.mini.stds()[i], midpoint);
      out.weight_sum += w;
      means[i] = (1.0 - w) * p.mini.means()[i] + w * p.full.means()[i];
    }
    out.correct += pick_winner(means, p.chosen_index).correct;
  }
  return out;
}

AdaptiveCounts adaptive_one(std::span<const PairedScores> pairs,
                            const std::pair<double, double>& cfg, int n_max) {
  RoutingConfig config;
  config.sigma1 = cfg.first;
  config.sigma2 = cfg.second;
  config.n_max = n_max;
  AdaptiveCounts out;
  for (const PairedScores& p : pairs) {
    std::array<int, kResponsesPerExample> n;
    for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
      n[i] = variance_informed_n(p.mini.stds()[i], config);
      out.total_calls += n[i];
    }
    out.correct += adaptive_verdict(p, n).correct;
  }
  return out;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<std::int64_t> bootstrap_counts_serial(
    std::span<const std::uint8_t> flags, int n_resamples, std::uint64_t seed) {
  std::vector<std::int64_t> out(n_resamples);
  for (int r = 0; r < n_resamples; ++r) out[r] = one_resample(flags, seed, r);
  return out;
}

std::vector<std::int64_t> bootstrap_counts_parallel(
    std::span<const std::uint8_t> flags, int n_resamples, std::uint64_t seed) {
  std::vector<std::int64_t> out(n_resamples);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n_resamples; ++r) out[r] = one_resample(flags, seed, r);
  return out;
}

std::int64_t paired_wins_serial(std::span<const std::uint8_t> a,
                                std::span<const std::uint8_t> b,
                                int n_resamples, std::uint64_t seed) {
  std::int64_t wins = 0;
  for (int r = 0; r < n_resamples; ++r) wins += one_paired_win(a, b, seed, r);
  return wins;
}

std::int64_t paired_wins_parallel(std::span<const std::uint8_t> a,
                                  std::span<const std::uint8_t> b,
                                  int n_resamples, std::uint64_t seed) {
  std::int64_t wins = 0;
#pragma omp parallel for schedule(static) reduction(+ : wins)
  for (int r = 0; r < n_resamples; ++r) wins += one_paired_win(a, b, seed, r);
  return wins;
}

PrefixCounts prefix_counts_serial(std::span<const JudgedMatrix> matrices, int j) {
  PrefixCounts counts;
  for (const JudgedMatrix& jm : matrices) tally(jm, j, counts);
  return counts;
}

PrefixCounts prefix_counts_parallel(std::span<const JudgedMatrix> matrices,
                                    int j) {
  std::size_t correct = 0;
  std::size_t ties = 0;
  const auto n = static_cast<std::int64_t>(matrices.size());
#pragma omp parallel for schedule(static) reduction(+ : correct, ties)
  for (std::int64_t e = 0; e < n; ++e) {
    PrefixCounts local;
    tally(matrices[e], j, local);
    correct += local.correct;
    ties += local.ties;
  }
  return {correct, ties};
}

std::vector<RouteCounts> hard_sweep_serial(std::span<const PairedScores> pairs,
                                           std::span<const double> thetas) {
  std::vector<RouteCounts> out(thetas.size());
  for (std::size_t t = 0; t < thetas.size(); ++t) out[t] = hard_one(pairs, thetas[t]);
  return out;
}

std::vector<RouteCounts> hard_sweep_parallel(std::span<const PairedScores> pairs,
                                             std::span<const double> thetas) {
  std::vector<RouteCounts> out(thetas.size());
  const auto n = static_cast<std::int64_t>(thetas.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < n; ++t) out[t] = hard_one(pairs, thetas[t]);
  return out;
}

std::vector<BlendCounts> blend_sweep_serial(std::span<const PairedScores> pairs,
                                            std::span<const double> midpoints) {
  std::vector<BlendCounts> out(midpoints.size());
  for (std::size_t m = 0; m < midpoints.size(); ++m) {
    out[m] = blend_one(pairs, midpoints[m]);
  }
  return out;
}

std::vector<BlendCounts> blend_sweep_parallel(std::span<const PairedScores> pairs,
                                              std::span<const double> midpoints) {
  std::vector<BlendCounts> out(midpoints.size());
  const auto n = static_cast<std::int64_t>(midpoints.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t m = 0; m < n; ++m) out[m] = blend_one(pairs, midpoints[m]);
  return out;
}

std::vector<AdaptiveCounts> adaptive_sweep_serial(
    std::span<const PairedScores> pairs,
    std::span<const std::pair<double, double>> configs, int n_max) {
  std::vector<AdaptiveCounts> out(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    out[c] = adaptive_one(pairs, configs[c], n_max);
  }
  return out;
}

std::vector<AdaptiveCounts> adaptive_sweep_parallel(
    std::span<const PairedScores> pairs,
    std::span<const std::pair<double, double>> configs, int n_max) {
  std::vector<AdaptiveCounts> out(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < n; ++c) out[c] = adaptive_one(pairs, configs[c], n_max);
  return out;
}

}  // namespace judgekit::kernels
