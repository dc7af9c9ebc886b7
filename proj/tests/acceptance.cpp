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

// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "judgekit/costing.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/escalation.hpp"
#include "judgekit/protocol.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/runner.hpp"
#include "judgekit/scoring.hpp"
#include "judgekit/simfixtures.hpp"
#include "judgekit/stats.hpp"

using namespace judgekit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void check(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    out.pass = false;
    out.detail += fmt::format("; over time limit {:.0f}s", limit_s);
  }
  if (!out.pass) ++failures;
  std::printf("%s %02d %s: %s (%.2fs)\n", out.pass ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fixture(const std::string& name) {
  return std::string(JUDGEKIT_SOURCE_DIR) + "/tests/fixtures/" + name;
}

RunOptions quiet() {
  RunOptions o;
  o.sleeper = [](auto) {};
  return o;
}

// Scores every example of a scenario with both models at k = 8.
std::vector<PairedScores> simulate_pairs(const ScenarioSpec& spec) {
  const Scenario sc = generate_scenario(spec);
  SimulatedBackend backend(sc.profiles);
  RecordStore store;
  ConditionConfig c;
  c.k = 8;
  c.seed = spec.seed;
  c.max_concurrency = 1;
  c.condition_id = "mini";
  c.model_id = spec.mini_model;
  run_condition(sc.dataset, c, backend, store, quiet());
  c.condition_id = "full";
  c.model_id = spec.full_model;
  run_condition(sc.dataset, c, backend, store, quiet());
  return pair_conditions(store, "mini", "full", PricingTable::builtin());
}

// ---------------------------------------------------------------------------
// Independent oracles

struct BruteVerdict {
  int winner = -1;  // -1: tie
  bool correct = false;
};

BruteVerdict brute_argmax(const std::array<double, 4>& m, int chosen) {
  double best = m[0];
  for (double x : m) best = std::max(best, x);
  int count = 0, at = -1;
  for (int i = 0; i < 4; ++i) {
    if (m[i] == best) {
      ++count;
      at = i;
    }
  }
  if (count != 1) return {-1, false};
  return {at, at == chosen};
}

std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : v) {
      less += x < v[i];
      equal += x == v[i];
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

std::optional<double> brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double brute_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      den += 1;
    }
  }
  return num / den;
}

// Exact P(sum a* > sum b*) over all n^n paired resamples.
double enumerate_paired(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> idx(n, 0);
  std::int64_t wins = 0, total = 0;
  while (true) {
    std::int64_t d = 0;
    for (std::size_t i : idx) d += a[i] - b[i];
    wins += d > 0;
    ++total;
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == n) break;
  }
  return static_cast<double>(wins) / total;
}

bool dominated(const ParetoPoint& p, const std::vector<ParetoPoint>& all) {
  for (const auto& q : all) {
    if (q.cost <= p.cost && q.accuracy >= p.accuracy &&
        (q.cost < p.cost || q.accuracy > p.accuracy)) {
      return true;
    }
  }
  return false;
}

// Replays canned completions; counts calls.
class Scripted : public JudgeBackend {
 public:
  explicit Scripted(std::string text) : text_(std::move(text)) {}
  JudgeResponse request_scores(const JudgeRequest& r) override {
    ++calls;
    JudgeResponse out;
    out.input_tokens = 10;
    out.completions.assign(r.n_completions, text_);
    out.output_tokens_per_completion.assign(r.n_completions, 5);
    return out;
  }
  int calls = 0;

 private:
  std::string text_;
};

}  // namespace

int main() {
  check(1, "protocol oracle", 5.0, [] {
    std::size_t checked = 0, mismatches = 0;
    auto compare = [&](const std::array<double, 4>& m, int chosen) {
      const Verdict v = pick_winner(m, chosen);
      const BruteVerdict b = brute_argmax(m, chosen);
      const int w = v.winner ? *v.winner : -1;
      mismatches += (w != b.winner) || (v.correct != b.correct);
      ++checked;
    };
    for (int a = 1; a <= 10; ++a)
      for (int b = 1; b <= 10; ++b)
        for (int c = 1; c <= 10; ++c)
          for (int d = 1; d <= 10; ++d)
            for (int chosen = 0; chosen < 4; ++chosen) compare({double(a), double(b), double(c), double(d)}, chosen);
    Rng rng(20260101);
    for (int t = 0; t < 10000; ++t) {
      std::array<double, 4> m;
      for (double& x : m) x = 1.0 + 9.0 * rng.uniform();
      // A quarter of the tuples carry a planted tie.
      if (t % 4 == 0) m[rng.below(4)] = m[rng.below(4)];
      compare(m, static_cast<int>(rng.below(4)));
    }
    return Outcome{mismatches == 0,
                   fmt::format("{} tuples checked, {} mismatches", checked, mismatches)};
  });

  check(2, "ensemble law", 60.0, [] {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ScenarioSpec s;
      s.n_examples = 2000;
      s.delta_mu = 1.0;
      s.sigma = 1.5;
      s.seed = seed;
      const Scenario sc = generate_scenario(s);
      SimulatedBackend backend(sc.profiles);
      RecordStore store;
      ConditionConfig c;
      c.condition_id = "k8";
      c.model_id = s.mini_model;
      c.k = 8;
      c.seed = seed;
      c.max_concurrency = 1;
      run_condition(sc.dataset, c, backend, store, quiet());
      const ConditionData d = collect_condition(store, "k8", PricingTable::builtin());
      const auto curve = ensemble_curve(d.matrices, 8);
      bool mono = true;
      for (int j = 1; j < 8; ++j) {
        mono &= curve[j].metrics.accuracy >= curve[j - 1].metrics.accuracy - 0.005;
      }
      const double a1 = curve[0].metrics.accuracy, a3 = curve[2].metrics.accuracy,
                   a8 = curve[7].metrics.accuracy;
      const double share = (a3 - a1) / (a8 - a1);
      const bool ties = curve[0].metrics.tie_rate > curve[7].metrics.tie_rate;
      ok &= mono && share >= 0.6 && a8 > a1 && ties;
      detail += fmt::format("{}seed {}: acc {:.1f}->{:.1f}%, k3 share {:.2f}, ties {:.1f}->{:.1f}%",
                            seed == 1 ? "" : "; ", seed, 100 * a1, 100 * a8, share,
                            100 * curve[0].metrics.tie_rate, 100 * curve[7].metrics.tie_rate);
    }
    return Outcome{ok, detail};
  });

  ScenarioSpec paired_spec;
  paired_spec.n_examples = 1000;
  paired_spec.delta_mu = 1.0;
  paired_spec.sigma = 1.5;
  paired_spec.capability_gap = 1.5;
  paired_spec.std_correlation = 0.42;
  paired_spec.seed = 77;
  const std::vector<PairedScores> pairs = simulate_pairs(paired_spec);

  check(3, "routing endpoint identities", 0, [&] {
    std::size_t mismatches = 0;
    std::size_t mini_correct = 0, full_correct = 0;
    for (const auto& p : pairs) {
      const Verdict mini = judge_example(p.mini, p.chosen_index);
      const Verdict full = judge_example(p.full, p.chosen_index);
      const Verdict none = pick_winner(hard_route(p, std::numeric_limits<double>::infinity()).effective_means,
                                       p.chosen_index);
      const Verdict all = pick_winner(hard_route(p, 0.0).effective_means, p.chosen_index);
      mismatches += none.winner != mini.winner || none.correct != mini.correct;
      mismatches += all.winner != full.winner || all.correct != full.correct;
      mini_correct += mini.correct;
      full_correct += full.correct;
    }
    const auto sweep = sweep_hard_threshold(pairs, CostInputs{});
    const bool ends = sweep.front().accuracy == double(full_correct) / pairs.size() &&
                      sweep.back().accuracy == double(mini_correct) / pairs.size();
    return Outcome{pairs.size() == 1000 && mismatches == 0 && ends,
                   fmt::format("{} pairs, {} verdict mismatches, sweep endpoints {}", pairs.size(),
                               mismatches, ends ? "exact" : "differ")};
  });

  check(4, "blend saturation", 0, [&] {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : pairs) {
      for (double s : p.mini.stds()) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
    double worst_full = 0.0, worst_mini = 0.0;
    for (const auto& p : pairs) {
      const auto f = soft_blend(p, lo - 3.0);
      const auto m = soft_blend(p, hi + 3.0);
      for (int i = 0; i < 4; ++i) {
        worst_full = std::max(worst_full, std::abs(f[i] - p.full.means()[i]));
        worst_mini = std::max(worst_mini, std::abs(m[i] - p.mini.means()[i]));
      }
    }
    Rng rng(4);
    bool half = true;
    for (int t = 0; t < 10000; ++t) {
      const double m = 10.0 * rng.uniform();
      half &= sigmoid_weight(m, m) == 0.5;
    }
    return Outcome{worst_full <= 1e-9 && worst_mini <= 1e-9 && half,
                   fmt::format("max |blend-full| {:.2e}, max |blend-mini| {:.2e}, w(m)=0.5 {}",
                               worst_full, worst_mini, half ? "exact" : "inexact")};
  });

  check(5, "adaptive ensembling", 0, [&] {
    Rng rng(5);
    std::size_t boundary_bad = 0, mono_bad = 0;
    for (int t = 0; t < 10000; ++t) {
      RoutingConfig c;
      c.sigma1 = 3.0 * rng.uniform();
      c.sigma2 = c.sigma1 + 1e-3 + 3.0 * rng.uniform();
      c.n_max = 1 + static_cast<int>(rng.below(16));
      boundary_bad += variance_informed_n(c.sigma1 * rng.uniform(), c) != 1;
      boundary_bad += variance_informed_n(c.sigma1, c) != 1;
      boundary_bad += variance_informed_n(c.sigma2, c) != c.n_max;
      boundary_bad += variance_informed_n(c.sigma2 + 5.0 * rng.uniform(), c) != c.n_max;
      std::vector<double> sig(64);
      for (double& s : sig) s = 7.0 * rng.uniform();
      std::sort(sig.begin(), sig.end());
      for (std::size_t i = 1; i < sig.size(); ++i) {
        mono_bad += variance_informed_n(sig[i], c) < variance_informed_n(sig[i - 1], c);
      }
    }
    const Split split = split_pairs(pairs, {0.8, 5, true});
    const AdaptiveFit fit = grid_search_adaptive(split.train, split.test, 8, 2.0);
    // Recount the chosen configuration's calls directly.
    RoutingConfig chosen;
    chosen.sigma1 = fit.sigma1;
    chosen.sigma2 = fit.sigma2;
    std::int64_t calls = 0;
    for (const auto& p : split.train) {
      for (double s : p.mini.stds()) calls += variance_informed_n(s, chosen);
    }
    const double mean_n = double(calls) / (4.0 * split.train.size());
    const bool budget_ok = fit.mean_n_full <= 2.0 && mean_n <= 2.0 && mean_n == fit.mean_n_full;
    return Outcome{boundary_bad == 0 && mono_bad == 0 && budget_ok,
                   fmt::format("boundary violations {}, monotonicity violations {}, budget run "
                               "mean n_full {:.4f} <= 2.0, test acc {:.1f}%",
                               boundary_bad, mono_bad, mean_n, 100 * fit.test_accuracy)};
  });

  check(6, "bootstrap machinery", 120.0, [] {
    std::vector<std::uint8_t> f(1729, 0);
    std::fill(f.begin(), f.begin() + 1240, 1);  // 71.7%
    const BootstrapResult r = bootstrap_ci(f, 2000, 0.95, 0);
    const double hw = 100 * r.half_width;
    const bool hw_ok = std::abs(hw - 2.1) <= 0.4;

    Rng data(6);
    int covered = 0;
    for (int t = 0; t < 500; ++t) {
      std::vector<std::uint8_t> x(1700);
      for (auto& v : x) v = data.bernoulli(0.8);
      const BootstrapResult b = bootstrap_ci(x, 2000, 0.95, 1000 + t);
      covered += b.ci_low <= 0.8 && 0.8 <= b.ci_high;
    }
    const double coverage = covered / 5.0;
    const bool cov_ok = coverage >= 93.0 && coverage <= 97.0;

    double worst_z = 0.0;
    Rng gen(66);
    const int R = 40000;
    for (std::size_t n = 1; n <= 6; ++n) {
      for (int rep = 0; rep < 4; ++rep) {
        std::vector<std::uint8_t> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
          a[i] = gen.bernoulli(0.6);
          b[i] = gen.bernoulli(0.5);
        }
        const double exact = enumerate_paired(a, b);
        const double est = paired_bootstrap(a, b, R, 9 + rep).p_a_gt_b;
        const double se = std::sqrt(std::max(exact * (1 - exact), 1e-12) / R);
        worst_z = std::max(worst_z, std::abs(est - exact) / se);
      }
    }
    const bool paired_ok = worst_z <= 4.0;
    return Outcome{hw_ok && cov_ok && paired_ok,
                   fmt::format("half-width {:.2f}pp (target 2.1 +/- 0.4), coverage {:.1f}% over "
                               "500 trials, paired vs enumeration worst |z| {:.2f}",
                               hw, coverage, worst_z)};
  });

  check(7, "statistic oracles", 0, [] {
    Rng rng(7);
    double worst = 0.0;
    std::size_t structural = 0;
    for (int t = 0; t < 1000; ++t) {
      // Coarse values force ties.
      const int levels = 2 + static_cast<int>(rng.below(9));
      std::array<double, 4> a, b;
      for (int i = 0; i < 4; ++i) {
        a[i] = 1.0 + static_cast<double>(rng.below(levels)) * (t % 2 ? 1.0 : 0.125);
        b[i] = 1.0 + static_cast<double>(rng.below(levels)) * 0.5;
      }
      const auto got = spearman_4(a, b);
      const auto want = brute_pearson(brute_ranks({a.begin(), a.end()}), brute_ranks({b.begin(), b.end()}));
      structural += got.has_value() != want.has_value();
      if (got && want) worst = std::max(worst, std::abs(*got - *want));

      const std::size_t n = 3 + rng.below(60);
      std::vector<double> x(n), y(n), s(n);
      std::vector<std::uint8_t> lab(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = t % 3 == 0 ? static_cast<double>(rng.below(4)) : rng.normal();
        y[i] = 0.5 * x[i] + rng.normal();
        s[i] = t % 2 ? static_cast<double>(rng.below(5)) : rng.uniform();
        lab[i] = static_cast<std::uint8_t>(i < 2 ? i : rng.below(2));
      }
      if (const auto p = brute_pearson(x, y)) worst = std::max(worst, std::abs(pearson(x, y) - *p));
      worst = std::max(worst, std::abs(auc(s, lab) - brute_auc(s, lab)));
    }
    return Outcome{worst <= 1e-12 && structural == 0,
                   fmt::format("3000 comparisons, max abs diff {:.2e}, defined/undefined mismatches {}",
                               worst, structural)};
  });

  check(8, "cost model", 0, [] {
    const ModelPricing p{2.50, 15.00};
    const std::vector<std::int64_t> outs(8, 200);
    const double hand = call_cost(500, outs, p);
    const bool hand_ok = std::abs(hand - 0.02525) <= 1e-12;

    Rng rng(8);
    bool linear = true, self = true;
    const PricingTable table = PricingTable::builtin();
    for (int t = 0; t < 10000; ++t) {
      const auto& mp = std::next(table.entries().begin(), rng.below(5))->second;
      const auto in = static_cast<std::int64_t>(rng.below(100000));
      std::vector<std::int64_t> o(1 + rng.below(8)), o2;
      for (auto& v : o) v = static_cast<std::int64_t>(rng.below(5000));
      for (auto v : o) o2.push_back(2 * v);
      linear &= call_cost(2 * in, o2, mp) == 2.0 * call_cost(in, o, mp);
      const double c = call_cost(in + 1, o, mp);
      self &= condition_ratio(c, c) == 1.0;
    }
    // Baseline row of a real report.
    ScenarioSpec s;
    s.n_examples = 50;
    const Scenario sc = generate_scenario(s);
    SimulatedBackend backend(sc.profiles);
    RecordStore store;
    ConditionConfig c;
    c.condition_id = "base";
    c.model_id = s.full_model;
    run_condition(sc.dataset, c, backend, store, quiet());
    const Report rep = build_report(store, {"base"}, "base");
    self &= rep.conditions.at(0).ledger.ratio_to_baseline == 1.0;
    return Outcome{hand_ok && linear && self,
                   fmt::format("hand example ${:.8f}, doubling exact {}, self-ratio exact {}",
                               hand, linear, self)};
  });

  check(9, "pareto extraction", 0, [] {
    Rng rng(9);
    std::size_t wrong = 0, not_idempotent = 0;
    for (int t = 0; t < 1000; ++t) {
      std::vector<ParetoPoint> pts(1 + rng.below(40));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i].cost = static_cast<double>(rng.below(12)) * 0.25;
        pts[i].accuracy = 50.0 + static_cast<double>(rng.below(15));
        pts[i].label = "p" + std::to_string(i);
      }
      std::vector<std::string> want;
      for (const auto& p : pts) {
        if (!dominated(p, pts)) want.push_back(p.label);
      }
      const auto front = pareto_frontier(pts);
      std::vector<std::string> got;
      for (const auto& p : front) got.push_back(p.label);
      std::sort(want.begin(), want.end());
      std::vector<std::string> sorted = got;
      std::sort(sorted.begin(), sorted.end());
      wrong += sorted != want;
      wrong += !std::is_sorted(front.begin(), front.end(),
                               [](const auto& a, const auto& b) { return a.cost < b.cost; });
      not_idempotent += pareto_frontier(front) != front;
    }
    return Outcome{wrong == 0 && not_idempotent == 0,
                   fmt::format("1000 point sets, {} oracle mismatches, {} non-idempotent", wrong,
                               not_idempotent)};
  });

  check(10, "convergence shape", 0, [] {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ScenarioSpec s;
      s.n_examples = 2000;
      s.delta_mu = 1.0;
      s.sigma = 1.5;
      s.capability_gap = 1.5;
      s.std_correlation = 0.42;
      s.seed = 100 + seed;
      const auto curve = convergence_curve(simulate_pairs(s), 8);
      bool mono = true;
      for (int j = 1; j < 8; ++j) mono &= curve[j].agreement >= curve[j - 1].agreement - 0.01;
      ok &= mono && curve[7].agreement > curve[0].agreement;
      detail += fmt::format("{}seed {}: {:.1f}->{:.1f}%", seed == 1 ? "" : "; ", seed,
                            100 * curve[0].agreement, 100 * curve[7].agreement);
    }
    return Outcome{ok, "agreement k=1->8 " + detail};
  });

  check(11, "end-to-end exactness", 0, [] {
    const Scenario sc = generate_scenario(load_scenario(fixture("scenario.json")));
    SimulatedBackend backend(sc.profiles);
    const auto path = std::filesystem::temp_directory_path() / "judgekit_acceptance_store.jsonl";
    std::filesystem::remove(path);
    std::size_t added_on_rerun = 0;
    std::string tsv;
    {
      RecordStore store{path};
      const auto manifest = load_manifest(fixture("manifest.json"));
      for (const auto& c : manifest) run_condition(sc.dataset, c, backend, store, quiet());
      RecordStore reopened = RecordStore::parse(store.serialize());
      for (const auto& c : manifest) {
        added_on_rerun += run_condition(sc.dataset, c, backend, store, quiet()).new_records;
      }
      std::vector<std::string> ids;
      for (const auto& [id, c] : store.conditions()) ids.push_back(id);
      tsv = format_report_tsv(build_report(store, ids, "full_k1"));
    }
    RecordStore from_disk{path};
    const std::string again = [&] {
      std::vector<std::string> ids;
      for (const auto& [id, c] : from_disk.conditions()) ids.push_back(id);
      return format_report_tsv(build_report(from_disk, ids, "full_k1"));
    }();
    std::filesystem::remove(path);
    std::ifstream in(fixture("golden_report.tsv"), std::ios::binary);
    std::ostringstream golden;
    golden << in.rdbuf();
    const bool same = tsv == golden.str() && again == golden.str();
    return Outcome{same && added_on_rerun == 0,
                   fmt::format("report {} golden ({} bytes), re-run added {} records",
                               same ? "matches" : "differs from", tsv.size(), added_on_rerun)};
  });

  check(12, "parser fixtures", 0, [] {
    std::ifstream in(fixture("parser_cases.jsonl"));
    std::string line;
    int cases = 0, wrong = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const ParsedScore p = parse_score(j.at("text").get<std::string>());
      const std::string status = p.status == ParseStatus::kOk         ? "ok"
                                 : p.status == ParseStatus::kNoScore ? "no_score"
                                                                     : "out_of_range";
      ++cases;
      if (status != j.at("status")) {
        ++wrong;
      } else if (p.ok() && p.score != j.at("score").get<int>()) {
        ++wrong;
      }
    }
    Scripted mute("I would rather not say.");
    JudgeRequest req;
    req.prompt = "p";
    req.model_id = "m";
    int sleeps = 0;
    ErrorCode code = ErrorCode::kIo;
    try {
      score_with_retries(mute, req, RetryPolicy{}, [&](auto) { ++sleeps; });
    } catch (const Error& e) {
      code = e.code();
    }
    const bool retry_ok = mute.calls == 3 && sleeps == 2 && code == ErrorCode::kScoringFailed;
    return Outcome{cases == 25 && wrong == 0 && retry_ok,
                   fmt::format("{} cases, {} wrong; unparseable judge gave up after {} attempts ({})",
                               cases, wrong, mute.calls, error_code_name(code))};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
