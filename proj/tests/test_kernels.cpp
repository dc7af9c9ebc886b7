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

#include <gtest/gtest.h>

#include "judgekit/kernels.hpp"
#include "judgekit/rng.hpp"

using namespace judgekit;

namespace {

std::vector<PairedScores> random_pairs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PairedScores> out;
  for (std::size_t e = 0; e < n; ++e) {
    std::array<std::vector<int>, 4> mini, full;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 8; ++j) {
        mini[i].push_back(1 + static_cast<int>(rng.below(10)));
        full[i].push_back(1 + static_cast<int>(rng.below(10)));
      }
    }
    PairedScores p;
    p.example_id = "e" + std::to_string(e);
    p.mini = assemble_matrix(p.example_id, mini);
    p.full = assemble_matrix(p.example_id, full);
    p.chosen_index = static_cast<int>(rng.below(4));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST(Kernels, BootstrapSerialEqualsParallel) {
  Rng rng(1);
  std::vector<std::uint8_t> f(1729);
  for (auto& x : f) x = rng.bernoulli(0.7);
  EXPECT_EQ(kernels::bootstrap_counts_serial(f, 2000, 3),
            kernels::bootstrap_counts_parallel(f, 2000, 3));
  std::vector<std::uint8_t> g(1729);
  for (auto& x : g) x = rng.bernoulli(0.72);
  EXPECT_EQ(kernels::paired_wins_serial(f, g, 2000, 8),
            kernels::paired_wins_parallel(f, g, 2000, 8));
}

TEST(Kernels, SweepsSerialEqualsParallel) {
  const auto pairs = random_pairs(500, 2);
  std::vector<JudgedMatrix> ms;
  for (const auto& p : pairs) ms.push_back({p.mini, p.chosen_index});
  for (int j = 1; j <= 8; ++j) {
    EXPECT_EQ(kernels::prefix_counts_serial(ms, j), kernels::prefix_counts_parallel(ms, j));
  }
  const std::vector<double> thetas = {0.0, 0.5, 1.0, 2.0, 3.0, 1e300};
  EXPECT_EQ(kernels::hard_sweep_serial(pairs, thetas), kernels::hard_sweep_parallel(pairs, thetas));
  const std::vector<double> mids = {0.0, 1.0, 2.5, 4.0};
  const auto bs = kernels::blend_sweep_serial(pairs, mids);
  const auto bp = kernels::blend_sweep_parallel(pairs, mids);
  ASSERT_EQ(bs.size(), bp.size());
  for (std::size_t i = 0; i < bs.size(); ++i) {
    EXPECT_EQ(bs[i].correct, bp[i].correct);
    EXPECT_NEAR(bs[i].weight_sum, bp[i].weight_sum, 1e-9);
  }
  const std::vector<std::pair<double, double>> cfg = {{0.5, 1.5}, {1.0, 3.0}, {2.0, 2.5}};
  EXPECT_EQ(kernels::adaptive_sweep_serial(pairs, cfg, 8),
            kernels::adaptive_sweep_parallel(pairs, cfg, 8));
  EXPECT_GE(kernels::max_threads(), 1);
}
