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

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; both produce identical results (no floating reductions
// whose order depends on scheduling), and tests compare them directly.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "judgekit/escalation.hpp"
#include "judgekit/protocol.hpp"

namespace judgekit::kernels {

// Number of 1-flags in each bootstrap resample.
std::vector<std::int64_t> bootstrap_counts_serial(
    std::span<const std::uint8_t> flags, int n_resamples, std::uint64_t seed);
std::vector<std::int64_t> bootstrap_counts_parallel(
    std::span<const std::uint8_t> flags, int n_resamples, std::uint64_t seed);

// Number of paired resamples where sum(a) > sum(b).
std::int64_t paired_wins_serial(std::span<const std::uint8_t> a,
                                std::span<const std::uint8_t> b,
                                int n_resamples, std::uint64_t seed);
std::int64_t paired_wins_parallel(std::span<const std::uint8_t> a,
                                  std::span<const std::uint8_t> b,
                                  int n_resamples, std::uint64_t seed);

struct PrefixCounts {
  std::size_t correct = 0;
  std::size_t ties = 0;
  friend bool operator==(const PrefixCounts&, const PrefixCounts&) = default;
};

PrefixCounts prefix_counts_serial(std::span<const JudgedMatrix> matrices, int j);
PrefixCounts prefix_counts_parallel(std::span<const JudgedMatrix> matrices, int j);

struct RouteCounts {
  std::int64_t correct = 0;
  std::int64_t escalated = 0;  // hard routing: escalated responses
  friend bool operator==(const RouteCounts&, const RouteCounts&) = default;
};

std::vector<RouteCounts> hard_sweep_serial(std::span<const PairedScores> pairs,
                                           std::span<const double> thetas);
std::vector<RouteCounts> hard_sweep_parallel(std::span<const PairedScores> pairs,
                                             std::span<const double> thetas);

struct BlendCounts {
  std::int64_t correct = 0;
  double weight_sum = 0.0;
  friend bool operator==(const BlendCounts&, const BlendCounts&) = default;
};

std::vector<BlendCounts> blend_sweep_serial(std::span<const PairedScores> pairs,
                                            std::span<const double> midpoints);
std::vector<BlendCounts> blend_sweep_parallel(std::span<const PairedScores> pairs,
                                              std::span<const double> midpoints);

struct AdaptiveCounts {
  std::int64_t correct = 0;
  std::int64_t total_calls = 0;
  friend bool operator==(const AdaptiveCounts&, const AdaptiveCounts&) = default;
};

std::vector<AdaptiveCounts> adaptive_sweep_serial(
    std::span<const PairedScores> pairs,
    std::span<const std::pair<double, double>> configs, int n_max);
std::vector<AdaptiveCounts> adaptive_sweep_parallel(
    std::span<const PairedScores> pairs,
    std::span<const std::pair<double, double>> configs, int n_max);

// Threads OpenMP will use (1 when built without OpenMP).
int max_threads();

}  // namespace judgekit::kernels
