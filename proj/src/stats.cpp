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

#include "judgekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "judgekit/errors.hpp"
#include "judgekit/kernels.hpp"

namespace judgekit {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::kDomain, "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BootstrapResult bootstrap_ci(std::span<const std::uint8_t> flags, int n_resamples,
                             double level, std::uint64_t seed) {
  if (flags.empty()) fail(ErrorCode::kDomain, "bootstrap of an empty sample");
  if (n_resamples < 1) fail(ErrorCode::kDomain, "n_resamples must be >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    fail(ErrorCode::kDomain, "confidence level must be in (0, 1)");
  }
  const double n = static_cast<double>(flags.size());
  const auto counts = kernels::bootstrap_counts_parallel(flags, n_resamples, seed);
  std::vector<double> acc(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) {
    acc[r] = static_cast<double>(counts[r]) / n;
  }
  std::sort(acc.begin(), acc.end());

  BootstrapResult out;
  std::int64_t hits = 0;
  for (auto f : flags) hits += f != 0;
  out.point_estimate = static_cast<double>(hits) / n;
  const double alpha = 1.0 - level;
  out.ci_low = quantile_sorted(acc, alpha / 2.0);
  out.ci_high = quantile_sorted(acc, 1.0 - alpha / 2.0);
  out.half_width = (out.ci_high - out.ci_low) / 2.0;
  out.n_resamples = n_resamples;
  out.seed = seed;
  return out;
}

ComparisonResult paired_bootstrap(std::span<const std::uint8_t> flags_a,
                                  std::span<const std::uint8_t> flags_b,
                                  int n_resamples, std::uint64_t seed) {
  if (flags_a.size() != flags_b.size()) {
    fail(ErrorCode::kDomain, "paired bootstrap needs equal-length inputs");
  }
  if (flags_a.empty()) fail(ErrorCode::kDomain, "paired bootstrap of empty input");
  if (n_resamples < 1) fail(ErrorCode::kDomain, "n_resamples must be >= 1");
  const std::int64_t wins =
      kernels::paired_wins_parallel(flags_a, flags_b, n_resamples, seed);
  return {static_cast<double>(wins) / n_resamples, n_resamples, seed};
}

double agreement(std::span<const Verdict> a, std::span<const Verdict> b) {
  if (a.size() != b.size() || a.empty()) {
    fail(ErrorCode::kDomain, "agreement needs two equal, non-empty verdict lists");
  }
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].example_id != b[i].example_id) {
      fail(ErrorCode::kDomain, "verdict lists are not aligned at position " +
                                   std::to_string(i));
    }
    if (a[i].winner && b[i].winner && *a[i].winner == *b[i].winner) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(a.size());
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

std::optional<double> pearson_or_null(std::span<const double> x,
                                      std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

std::optional<double> spearman_4(const std::array<double, 4>& a,
                                 const std::array<double, 4>& b) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      fail(ErrorCode::kDomain, "spearman of non-finite values");
    }
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson_or_null(ra, rb);
}

MeanSpearman mean_spearman(std::span<const std::array<double, 4>> a,
                           std::span<const std::array<double, 4>> b) {
  if (a.size() != b.size()) fail(ErrorCode::kDomain, "misaligned mean vectors");
  MeanSpearman out;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (auto rho = spearman_4(a[i], b[i])) {
      total += *rho;
      ++out.used;
    } else {
      ++out.excluded;
    }
  }
  if (out.used > 0) out.mean = total / static_cast<double>(out.used);
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::kDomain, "pearson needs equal lengths");
  if (x.size() < 2) fail(ErrorCode::kDomain, "pearson needs at least 2 points");
  auto r = pearson_or_null(x, y);
  if (!r) fail(ErrorCode::kDomain, "pearson undefined for zero variance");
  return *r;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::kDomain, "auc needs equal-length scores and labels");
  }
  std::size_t pos = 0;
  for (auto l : labels) pos += l != 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) fail(ErrorCode::kDomain, "auc needs both classes");
  const auto ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) rank_sum += ranks[i];
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

}  // namespace judgekit
