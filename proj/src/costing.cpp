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

#include "judgekit/costing.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "judgekit/errors.hpp"

namespace judgekit {

PricingTable::PricingTable(std::map<std::string, ModelPricing> entries)
    : entries_(std::move(entries)) {
  for (const auto& [id, p] : entries_) {
    if (!(p.input_usd_per_million > 0.0) || !(p.output_usd_per_million > 0.0)) {
      fail(ErrorCode::kConfig, "prices for '" + id + "' must be positive");
    }
  }
}

PricingTable PricingTable::builtin() {
  return PricingTable({
      {"claude-sonnet-4.6", {3.00, 15.00, ModelClass::kFull, "Claude Sonnet 4.6"}},
      {"gpt-5.4", {2.50, 15.00, ModelClass::kFull, "GPT-5.4"}},
      {"claude-haiku-4.5", {1.00, 5.00, ModelClass::kMini, "Claude Haiku 4.5"}},
      {"gpt-5.4-mini", {0.75, 4.50, ModelClass::kMini, "GPT-5.4 mini"}},
      {"gpt-5.4-nano", {0.20, 1.25, ModelClass::kNano, "GPT-5.4 nano"}},
  });
}

PricingTable PricingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open pricing '" + path.string() + "'");
  auto entries = builtin().entries_;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& [id, v] : doc.at("models").items()) {
      ModelPricing p;
      p.input_usd_per_million = v.at("input_usd_per_million").get<double>();
      p.output_usd_per_million = v.at("output_usd_per_million").get<double>();
      const std::string cls = v.value("class", "full");
      if (cls == "full") {
        p.model_class = ModelClass::kFull;
      } else if (cls == "mini") {
        p.model_class = ModelClass::kMini;
      } else if (cls == "nano") {
        p.model_class = ModelClass::kNano;
      } else {
        fail(ErrorCode::kConfig, "unknown model class '" + cls + "'");
      }
      p.display_name = v.value("display_name", id);
      entries[id] = p;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig,
         "malformed pricing file '" + path.string() + "': " + e.what());
  }
  return PricingTable(std::move(entries));
}

bool PricingTable::contains(const std::string& model) const {
  if (entries_.count(model)) return true;
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.second.display_name == model; });
}

const ModelPricing& PricingTable::at(const std::string& model) const {
  if (auto it = entries_.find(model); it != entries_.end()) return it->second;
  for (const auto& [id, p] : entries_) {
    if (p.display_name == model) return p;
  }
  fail(ErrorCode::kConfig, "no pricing for model '" + model + "'");
}

double call_cost(std::int64_t input_tokens,
                 std::span<const std::int64_t> output_tokens_per_completion,
                 const ModelPricing& pricing) {
  if (input_tokens < 0) fail(ErrorCode::kDomain, "negative input token count");
  std::int64_t out = 0;
  for (auto t : output_tokens_per_completion) {
    if (t < 0) fail(ErrorCode::kDomain, "negative output token count");
    out += t;
  }
  return static_cast<double>(input_tokens) * pricing.input_usd_per_million / 1e6 +
         static_cast<double>(out) * pricing.output_usd_per_million / 1e6;
}

double condition_ratio(double ledger_dollars, double baseline_dollars) {
  if (!(baseline_dollars > 0.0)) {
    fail(ErrorCode::kDomain, "baseline cost must be positive");
  }
  return ledger_dollars / baseline_dollars;
}

std::vector<ParetoPoint> pareto_frontier(std::span<const ParetoPoint> points) {
  std::vector<ParetoPoint> sorted(points.begin(), points.end());
  // Cost ascending, accuracy descending: a point is kept iff its accuracy
  // beats every cheaper-or-equal point seen so far (or ties an identical one).
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.label < b.label;
  });
  std::vector<ParetoPoint> frontier;
  for (const ParetoPoint& p : sorted) {
    if (frontier.empty() || p.accuracy > frontier.back().accuracy) {
      frontier.push_back(p);
    } else if (p.accuracy == frontier.back().accuracy &&
               p.cost == frontier.back().cost) {
      frontier.push_back(p);
    }
  }
  return frontier;
}

std::string format_frontier(std::span<const ParetoPoint> points) {
  std::string out = "label\tcost_ratio\taccuracy\tci_half_width\n";
  for (const ParetoPoint& p : points) {
    out += fmt::format("{}\t{:.6f}\t{:.6f}\t{:.6f}\n", p.label, p.cost,
                       p.accuracy, p.ci_half_width);
  }
  return out;
}

std::vector<ParetoPoint> parse_frontier_rows(const std::string& text) {
  std::vector<ParetoPoint> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line.rfind("label\t", 0) == 0) continue;
    std::istringstream row(line);
    ParetoPoint p;
    std::string cost, acc, hw;
    if (!std::getline(row, p.label, '\t') || !std::getline(row, cost, '\t') ||
        !std::getline(row, acc, '\t')) {
      fail(ErrorCode::kValidation,
           "line " + std::to_string(line_number) + ": expected label, cost, accuracy");
    }
    std::getline(row, hw, '\t');
    try {
      p.cost = std::stod(cost);
      p.accuracy = std::stod(acc);
      p.ci_half_width = hw.empty() ? 0.0 : std::stod(hw);
    } catch (const std::exception&) {
      fail(ErrorCode::kValidation,
           "line " + std::to_string(line_number) + ": non-numeric field");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace judgekit
