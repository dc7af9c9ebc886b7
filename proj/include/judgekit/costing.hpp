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

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace judgekit {

enum class ModelClass { kFull, kMini, kNano };

struct ModelPricing {
  double input_usd_per_million = 0.0;
  double output_usd_per_million = 0.0;
  ModelClass model_class = ModelClass::kFull;
  std::string display_name;
};

class PricingTable {
 public:
  PricingTable() = default;
  explicit PricingTable(std::map<std::string, ModelPricing> entries);

  // Five-model reference table keyed by model id (gpt-5.4, gpt-5.4-mini,
  // gpt-5.4-nano, claude-sonnet-4.6, claude-haiku-4.5).
  static PricingTable builtin();
  // Entries in the file override or extend the built-in table.
  static PricingTable load(const std::filesystem::path& path);

  // Accepts a model id or display name. Throws Error(kConfig) when unknown.
  const ModelPricing& at(const std::string& model) const;
  bool contains(const std::string& model) const;
  const std::map<std::string, ModelPricing>& entries() const { return entries_; }

 private:
  std::map<std::string, ModelPricing> entries_;
};

// input_tokens * in_rate / 1e6 + sum(outputs) * out_rate / 1e6.
// Throws Error(kDomain) for negative counts.
double call_cost(std::int64_t input_tokens,
                 std::span<const std::int64_t> output_tokens_per_completion,
                 const ModelPricing& pricing);

// Throws Error(kDomain) when baseline_dollars <= 0.
double condition_ratio(double ledger_dollars, double baseline_dollars);

struct CostLedger {
  std::string condition_id;
  std::int64_t total_input_tokens = 0;
  std::int64_t total_output_tokens = 0;
  double dollars = 0.0;
  double baseline_dollars = 0.0;
  double ratio_to_baseline = 0.0;
};

struct ParetoPoint {
  double cost = 0.0;
  double accuracy = 0.0;
  std::string label;
  double ci_half_width = 0.0;
  friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

// Non-dominated points sorted by cost ascending (ties broken by label).
// A point is dominated when another has cost <= and accuracy >= with at least
// one strict. Exact duplicates are both kept.
std::vector<ParetoPoint> pareto_frontier(std::span<const ParetoPoint> points);

// Rows "label<TAB>cost_ratio<TAB>accuracy<TAB>ci_half_width" with a header.
std::string format_frontier(std::span<const ParetoPoint> points);
std::vector<ParetoPoint> parse_frontier_rows(const std::string& text);

}  // namespace judgekit
