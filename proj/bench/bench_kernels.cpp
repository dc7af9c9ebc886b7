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

// Serial vs OpenMP kernels on simulated judge data.

#include <benchmark/benchmark.h>

#include <vector>

#include "judgekit/kernels.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/runner.hpp"
#include "judgekit/simfixtures.hpp"

using namespace judgekit;

namespace {

struct Data {
  std::vector<std::uint8_t> a, b;
  std::vector<JudgedMatrix> matrices;
  std::vector<PairedScores> pairs;
  std::vector<double> thetas;
  std::vector<std::pair<double, double>> configs;
};

const Data& data() {
  static const Data d = [] {
    Data d;
    Rng rng(42);
    for (int i = 0; i < 1729; ++i) {
      d.a.push_back(rng.bernoulli(0.72));
      d.b.push_back(rng.bernoulli(0.68));
    }
    ScenarioSpec s;
    s.n_examples = 2000;
    s.capability_gap = 1.5;
    s.std_correlation = 0.42;
    s.seed = 3;
    const Scenario sc = generate_scenario(s);
    SimulatedBackend backend(sc.profiles);
    RecordStore store;
    RunOptions opt;
    opt.sleeper = [](auto) {};
    ConditionConfig c;
    c.k = 8;
    c.max_concurrency = 1;
    c.condition_id = "mini";
    c.model_id = s.mini_model;
    run_condition(sc.dataset, c, backend, store, opt);
    c.condition_id = "full";
    c.model_id = s.full_model;
    run_condition(sc.dataset, c, backend, store, opt);
    const PricingTable& prices = PricingTable::builtin();
    d.matrices = collect_condition(store, "mini", prices).matrices;
    d.pairs = pair_conditions(store, "mini", "full", prices);
    for (int i = 0; i <= 200; ++i) d.thetas.push_back(0.02 * i);
    for (int i = 0; i < 20; ++i)
      for (int j = i + 1; j <= 20; ++j) d.configs.emplace_back(0.2 * i, 0.2 * j);
    return d;
  }();
  return d;
}

template <auto Fn>
void BM_bootstrap(benchmark::State& st) {
  const auto& d = data();
  for (auto _ : st) benchmark::DoNotOptimize(Fn(d.a, 2000, 7));
}

template <auto Fn>
void BM_paired(benchmark::State& st) {
  const auto& d = data();
  for (auto _ : st) benchmark::DoNotOptimize(Fn(d.a, d.b, 2000, 7));
}

template <auto Fn>
void BM_prefix(benchmark::State& st) {
  const auto& d = data();
  for (auto _ : st) benchmark::DoNotOptimize(Fn(d.matrices, 3));
}

template <auto Fn>
void BM_hard(benchmark::State& st) {
  const auto& d = data();
  for (auto _ : st) benchmark::DoNotOptimize(Fn(d.pairs, d.thetas));
}

template <auto Fn>
void BM_adaptive(benchmark::State& st) {
  const auto& d = data();
  for (auto _ : st) benchmark::DoNotOptimize(Fn(d.pairs, d.configs, 8));
}

}  // namespace

BENCHMARK(BM_bootstrap<kernels::bootstrap_counts_serial>)->Name("bootstrap/serial");
BENCHMARK(BM_bootstrap<kernels::bootstrap_counts_parallel>)->Name("bootstrap/omp");
BENCHMARK(BM_paired<kernels::paired_wins_serial>)->Name("paired/serial");
BENCHMARK(BM_paired<kernels::paired_wins_parallel>)->Name("paired/omp");
BENCHMARK(BM_prefix<kernels::prefix_counts_serial>)->Name("prefix/serial");
BENCHMARK(BM_prefix<kernels::prefix_counts_parallel>)->Name("prefix/omp");
BENCHMARK(BM_hard<kernels::hard_sweep_serial>)->Name("hard_sweep/serial");
BENCHMARK(BM_hard<kernels::hard_sweep_parallel>)->Name("hard_sweep/omp");
BENCHMARK(BM_adaptive<kernels::adaptive_sweep_serial>)->Name("adaptive_sweep/serial");
BENCHMARK(BM_adaptive<kernels::adaptive_sweep_parallel>)->Name("adaptive_sweep/omp");

BENCHMARK_MAIN();
