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

// judgekit command-line driver.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "judgekit/costing.hpp"
#include "judgekit/dataset.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/escalation.hpp"
#include "judgekit/judge_backend.hpp"
#include "judgekit/runner.hpp"
#include "judgekit/simfixtures.hpp"

namespace fs = std::filesystem;
using namespace judgekit;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PricingTable pricing_from(const std::string& path) {
  return path.empty() ? PricingTable::builtin() : PricingTable::load(path);
}

std::unique_ptr<JudgeBackend> make_backend(const std::string& kind,
                                           const std::string& profiles) {
  if (kind == "sim") {
    if (profiles.empty()) fail(ErrorCode::kConfig, "--profiles is required for the sim backend");
    return std::make_unique<SimulatedBackend>(load_profiles(profiles));
  }
  if (kind == "live") {
    return std::make_unique<LiveBackend>(
        std::shared_ptr<HttpTransport>(make_http_transport()));
  }
  fail(ErrorCode::kConfig, "unknown backend '" + kind + "'");
}

void print_summary(const std::string& id, const RunSummary& s) {
  std::cerr << fmt::format("{}: {} new records, {} ok, {} refused, {} failed\n", id,
                           s.new_records, s.ok_examples, s.refused_examples,
                           s.failed_examples);
}

// Dollar inputs for the escalation cost model, measured from the store.
CostInputs measured_costs(const RecordStore& store, const std::string& mini_id,
                          const std::string& full_id, const PricingTable& pricing) {
  const ConditionData mini = collect_condition(store, mini_id, pricing);
  const ConditionData full = collect_condition(store, full_id, pricing);
  const ModelPricing& fp = pricing.at(full.config.model_id);
  const double rows = 4.0 * static_cast<double>(std::max<std::size_t>(1, full.attempted()));
  CostInputs c;
  c.mini_per_example = mini.dollars_per_example();
  c.full_input_per_response =
      static_cast<double>(full.input_tokens) * fp.input_usd_per_million / 1e6 / rows;
  c.full_output_per_completion = static_cast<double>(full.output_tokens) *
                                 fp.output_usd_per_million / 1e6 /
                                 (rows * full.config.k);
  c.full_k = full.config.k;
  return c;
}

// Splits a tab-separated table into header-keyed rows.
std::vector<std::map<std::string, std::string>> read_tsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) {
      row[header[i]] = cells[i];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ParetoPoint> points_from_table(const std::string& text) {
  if (text.rfind("label\t", 0) == 0) return parse_frontier_rows(text);
  std::vector<ParetoPoint> points;
  for (auto& row : read_tsv(text)) {
    if (!row.count("condition") || !row.count("cost_ratio") ||
        !row.count("accuracy_pct")) {
      fail(ErrorCode::kValidation, "report table lacks condition/cost_ratio/accuracy_pct");
    }
    if (row["accuracy_pct"] == "NA") continue;
    ParetoPoint p;
    p.label = row["condition"];
    p.cost = std::stod(row["cost_ratio"]);
    p.accuracy = std::stod(row["accuracy_pct"]);
    const std::string hw = row.count("ci_half_width_pp") ? row["ci_half_width_pp"] : "0";
    p.ci_half_width = hw == "NA" ? 0.0 : std::stod(hw);
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"judgekit: LLM-as-a-judge evaluation harness"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "score a dataset under each condition in a manifest");
  std::string run_dataset, run_manifest, run_store, run_backend = "sim", run_profiles;
  std::vector<std::string> run_only;
  int run_initial_ms = 1000;
  run->add_option("--dataset", run_dataset)->required();
  run->add_option("--manifest", run_manifest)->required();
  run->add_option("--store", run_store)->required();
  run->add_option("--backend", run_backend, "sim or live")->capture_default_str();
  run->add_option("--profiles", run_profiles, "simulated judge profiles");
  run->add_option("--only", run_only, "condition ids to run");
  run->add_option("--retry-initial-ms", run_initial_ms)->capture_default_str();

  // report
  auto* rep = app.add_subcommand("report", "accuracy, CIs and cost ratios per condition");
  std::string rep_store, rep_baseline, rep_out, rep_json, rep_pricing;
  std::vector<std::string> rep_conditions;
  bool rep_intersection = false;
  int rep_resamples = kDefaultResamples;
  std::uint64_t rep_seed = 0;
  rep->add_option("--store", rep_store)->required();
  rep->add_option("--baseline", rep_baseline)->required();
  rep->add_option("--conditions", rep_conditions, "default: every condition in the store");
  rep->add_flag("--intersection", rep_intersection);
  rep->add_option("--out", rep_out, "TSV output (default stdout)");
  rep->add_option("--json", rep_json, "structured summary output");
  rep->add_option("--resamples", rep_resamples)->capture_default_str();
  rep->add_option("--seed", rep_seed)->capture_default_str();
  rep->add_option("--pricing", rep_pricing);

  // escalate
  auto* esc = app.add_subcommand("escalate", "mini/full routing analyses");
  std::string esc_store, esc_mini, esc_full, esc_strategy = "hard", esc_out, esc_pricing;
  std::uint64_t esc_split_seed = 0;
  double esc_train = 0.8;
  std::optional<double> esc_budget;
  int esc_n_max = 8;
  esc->add_option("--store", esc_store)->required();
  esc->add_option("--mini", esc_mini, "mini-model condition id")->required();
  esc->add_option("--full", esc_full, "full-model condition id")->required();
  esc->add_option("--strategy", esc_strategy)
      ->check(CLI::IsMember({"hard", "blend", "adaptive", "convergence", "diagnostics"}))
      ->capture_default_str();
  esc->add_option("--split-seed", esc_split_seed)->capture_default_str();
  esc->add_option("--train-fraction", esc_train)->capture_default_str();
  esc->add_option("--budget", esc_budget, "max mean full-model calls per response");
  esc->add_option("--n-max", esc_n_max)->capture_default_str();
  esc->add_option("--out", esc_out);
  esc->add_option("--pricing", esc_pricing);

  // pareto
  auto* par = app.add_subcommand("pareto", "cost/accuracy frontier of report rows");
  std::string par_in, par_out;
  par->add_option("--input", par_in, "report TSV or frontier rows")->required();
  par->add_option("--out", par_out);

  // sweep-temp
  auto* swp = app.add_subcommand("sweep-temp", "k=1 vs k=k_max across temperatures");
  std::string swp_dataset, swp_store, swp_backend = "sim", swp_profiles, swp_out;
  std::string swp_model, swp_id = "temp", swp_prompt = "base";
  std::vector<double> swp_temps = {0.0, 0.5, 1.0, 1.5, 2.0};
  int swp_k = 8;
  std::uint64_t swp_seed = 0;
  swp->add_option("--dataset", swp_dataset)->required();
  swp->add_option("--store", swp_store)->required();
  swp->add_option("--model", swp_model)->required();
  swp->add_option("--backend", swp_backend)->capture_default_str();
  swp->add_option("--profiles", swp_profiles);
  swp->add_option("--id", swp_id, "condition id prefix")->capture_default_str();
  swp->add_option("--prompt", swp_prompt)->capture_default_str();
  swp->add_option("--temperatures", swp_temps)->capture_default_str();
  swp->add_option("--k", swp_k)->capture_default_str();
  swp->add_option("--seed", swp_seed)->capture_default_str();
  swp->add_option("--out", swp_out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "synthetic dataset and judge profiles");
  std::string sim_scenario, sim_dir, sim_manifest, sim_store;
  sim->add_option("--scenario", sim_scenario)->required();
  sim->add_option("--out-dir", sim_dir)->required();
  sim->add_option("--manifest", sim_manifest, "also run these conditions");
  sim->add_option("--store", sim_store, "store for --manifest runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const Dataset dataset = load_dataset(run_dataset);
      auto backend = make_backend(run_backend, run_profiles);
      RecordStore store{fs::path(run_store)};
      RunOptions options;
      options.retry.initial_delay = std::chrono::milliseconds(run_initial_ms);
      for (const ConditionConfig& c : load_manifest(run_manifest)) {
        if (!run_only.empty() &&
            std::find(run_only.begin(), run_only.end(), c.condition_id) == run_only.end()) {
          continue;
        }
        print_summary(c.condition_id, run_condition(dataset, c, *backend, store, options));
      }
    } else if (*rep) {
      const RecordStore store{fs::path(rep_store)};
      if (rep_conditions.empty()) {
        for (const auto& [id, c] : store.conditions()) rep_conditions.push_back(id);
      }
      ReportOptions options;
      options.intersection = rep_intersection;
      options.n_resamples = rep_resamples;
      options.seed = rep_seed;
      options.pricing = pricing_from(rep_pricing);
      const Report report = build_report(store, rep_conditions, rep_baseline, options);
      write_text(rep_out, format_report_tsv(report));
      if (!rep_json.empty()) write_text(rep_json, report_to_json(report).dump(2) + "\n");
    } else if (*esc) {
      const RecordStore store{fs::path(esc_store)};
      const PricingTable pricing = pricing_from(esc_pricing);
      const auto pairs = pair_conditions(store, esc_mini, esc_full, pricing);
      if (pairs.empty()) fail(ErrorCode::kConfig, "no paired examples");
      std::string out;
      if (esc_strategy == "hard") {
        const CostInputs cost = measured_costs(store, esc_mini, esc_full, pricing);
        out = "theta\taccuracy_pct\tp_esc\tdollars_per_example\n";
        for (const auto& p : sweep_hard_threshold(pairs, cost)) {
          out += fmt::format("{:.6f}\t{:.4f}\t{:.6f}\t{:.8f}\n", p.theta, 100.0 * p.accuracy,
                             p.p_esc, p.cost);
        }
      } else if (esc_strategy == "blend") {
        const Split split = split_pairs(pairs, {esc_train, esc_split_seed, true});
        const BlendFit fit = fit_blend_midpoint(split.train, split.test);
        out = fmt::format(
            "midpoint\ttrain_accuracy_pct\ttest_accuracy_pct\tn_train\tn_test\n"
            "{:.6f}\t{:.4f}\t{:.4f}\t{}\t{}\n",
            fit.midpoint, 100.0 * fit.train_accuracy, 100.0 * fit.test_accuracy,
            split.train.size(), split.test.size());
      } else if (esc_strategy == "adaptive") {
        const Split split = split_pairs(pairs, {esc_train, esc_split_seed, true});
        const AdaptiveFit fit = grid_search_adaptive(split.train, split.test, esc_n_max, esc_budget);
        out = fmt::format(
            "sigma1\tsigma2\ttrain_accuracy_pct\ttest_accuracy_pct\tmean_n_full\t"
            "test_mean_n_full\n{:.6f}\t{:.6f}\t{:.4f}\t{:.4f}\t{:.6f}\t{:.6f}\n",
            fit.sigma1, fit.sigma2, 100.0 * fit.train_accuracy, 100.0 * fit.test_accuracy,
            fit.mean_n_full, fit.test_mean_n_full);
      } else if (esc_strategy == "convergence") {
        int k_max = std::numeric_limits<int>::max();
        for (const auto& p : pairs) k_max = std::min({k_max, p.mini.k(), p.full.k()});
        out = "k\tagreement_pct\tmean_spearman\tspearman_excluded\n";
        for (const auto& p : convergence_curve(pairs, k_max)) {
          out += fmt::format("{}\t{:.4f}\t{:.6f}\t{}\n", p.k, 100.0 * p.agreement,
                             p.mean_spearman, p.spearman_excluded);
        }
      } else {
        const VarianceDiagnostics d = variance_diagnostics(pairs);
        out = fmt::format(
            "mini_full_std_pearson\tmini_std_error_auc\tmini_std_correct_pearson\n"
            "{:.6f}\t{:.6f}\t{:.6f}\n",
            d.mini_full_std_pearson, d.mini_std_error_auc, d.mini_std_correct_pearson);
      }
      write_text(esc_out, out);
    } else if (*par) {
      const auto points = points_from_table(read_text(par_in));
      write_text(par_out, format_frontier(pareto_frontier(points)));
    } else if (*swp) {
      const Dataset dataset = load_dataset(swp_dataset);
      auto backend = make_backend(swp_backend, swp_profiles);
      RecordStore store{fs::path(swp_store)};
      ConditionConfig base;
      base.condition_id = swp_id;
      base.model_id = swp_model;
      base.k = swp_k;
      base.prompt_variant = parse_prompt_variant_spec(swp_prompt);
      base.seed = swp_seed;
      const auto rows = run_temperature_sweep(dataset, base, swp_temps, *backend, store);
      write_text(swp_out, format_temperature_tsv(rows));
    } else if (*sim) {
      const Scenario scenario = generate_scenario(load_scenario(sim_scenario));
      fs::create_directories(sim_dir);
      save_dataset(scenario.dataset, fs::path(sim_dir) / "dataset.jsonl");
      save_profiles(scenario.profiles, fs::path(sim_dir) / "profiles.json");
      if (!sim_manifest.empty()) {
        if (sim_store.empty()) fail(ErrorCode::kConfig, "--manifest needs --store");
        SimulatedBackend backend(scenario.profiles);
        RecordStore store{fs::path(sim_store)};
        for (const ConditionConfig& c : load_manifest(sim_manifest)) {
          print_summary(c.condition_id, run_condition(scenario.dataset, c, backend, store));
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << fmt::format("error [{}]: {}\n", error_code_name(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
