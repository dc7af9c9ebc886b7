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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "judgekit/errors.hpp"
#include "judgekit/stats.hpp"

using namespace judgekit;

namespace {

std::vector<std::uint8_t> flags(std::size_t n, std::size_t ones) {
  std::vector<std::uint8_t> f(n, 0);
  std::fill(f.begin(), f.begin() + ones, 1);
  return f;
}

}  // namespace

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.1), 1.4);
  EXPECT_THROW(quantile_sorted(std::vector<double>{}, 0.5), Error);
}

TEST(Bootstrap, DeterministicAndBracketsEstimate) {
  const auto f = flags(400, 300);
  const BootstrapResult a = bootstrap_ci(f, 2000, 0.95, 5);
  const BootstrapResult b = bootstrap_ci(f, 2000, 0.95, 5);
  EXPECT_EQ(a.ci_low, b.ci_low);
  EXPECT_EQ(a.ci_high, b.ci_high);
  EXPECT_DOUBLE_EQ(a.point_estimate, 0.75);
  EXPECT_LT(a.ci_low, 0.75);
  EXPECT_GT(a.ci_high, 0.75);
  // Normal approximation: 1.96 * sqrt(p(1-p)/n) = 4.24pp.
  EXPECT_NEAR(a.half_width, 0.0424, 0.005);
  EXPECT_EQ(a.n_resamples, 2000);
}

TEST(Bootstrap, DegenerateSamples) {
  const auto all = flags(50, 50);
  const BootstrapResult r = bootstrap_ci(all);
  EXPECT_EQ(r.ci_low, 1.0);
  EXPECT_EQ(r.half_width, 0.0);
  EXPECT_THROW(bootstrap_ci(std::vector<std::uint8_t>{}), Error);
  EXPECT_THROW(bootstrap_ci(all, 0), Error);
  EXPECT_THROW(bootstrap_ci(all, 100, 1.0), Error);
}

TEST(PairedBootstrap, IdenticalInputsNeverStrictlyWin) {
  const auto f = flags(100, 60);
  EXPECT_EQ(paired_bootstrap(f, f).p_a_gt_b, 0.0);
  const auto better = flags(100, 90);
  EXPECT_GT(paired_bootstrap(better, f).p_a_gt_b, 0.99);
  EXPECT_THROW(paired_bootstrap(f, flags(99, 10)), Error);
}

TEST(Agreement, TiesDisagree) {
  std::vector<Verdict> a = {pick_winner({9, 1, 1, 1}, 0), pick_winner({5, 5, 1, 1}, 0),
                            pick_winner({1, 9, 1, 1}, 0)};
  std::vector<Verdict> b = {pick_winner({9, 1, 1, 1}, 0), pick_winner({5, 5, 1, 1}, 0),
                            pick_winner({1, 1, 9, 1}, 0)};
  for (std::size_t i = 0; i < 3; ++i) a[i].example_id = b[i].example_id = std::to_string(i);
  EXPECT_DOUBLE_EQ(agreement(a, b), 1.0 / 3.0);
  b[0].example_id = "x";
  EXPECT_THROW(agreement(a, b), Error);
}

TEST(Spearman, KnownValues) {
  EXPECT_DOUBLE_EQ(*spearman_4({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(*spearman_4({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_FALSE(spearman_4({5, 5, 5, 5}, {1, 2, 3, 4}).has_value());
  // Ranks (1.5,1.5,3,4) vs (1,2,3,4): Pearson of ranks.
  EXPECT_NEAR(*spearman_4({2, 2, 3, 4}, {1, 2, 3, 4}), 0.9486832980505138, 1e-12);
  std::vector<std::array<double, 4>> a = {{1, 2, 3, 4}, {5, 5, 5, 5}, {1, 2, 3, 4}};
  std::vector<std::array<double, 4>> b = {{1, 2, 3, 4}, {1, 2, 3, 4}, {4, 3, 2, 1}};
  const MeanSpearman m = mean_spearman(a, b);
  EXPECT_EQ(m.used, 2u);
  EXPECT_EQ(m.excluded, 1u);
  EXPECT_DOUBLE_EQ(m.mean, 0.0);
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v = {3, 1, 3, 2, 3};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{4, 1, 4, 2, 4}));
}

TEST(Pearson, KnownAndErrors) {
  EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 7}),
              0.9933992677987828, 1e-12);
  EXPECT_THROW(pearson(std::vector<double>{1, 1}, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST(Auc, KnownValues) {
  const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
  const std::vector<std::uint8_t> y = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(auc(s, y), 0.75);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{1, 1, 1}, std::vector<std::uint8_t>{1, 0, 0}), 0.5);
  EXPECT_THROW(auc(s, std::vector<std::uint8_t>{1, 1, 1, 1}), Error);
}
