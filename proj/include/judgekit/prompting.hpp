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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "judgekit/dataset.hpp"
#include "judgekit/rng.hpp"

namespace judgekit {

enum class PromptKind {
  kBase,
  kCriteria,
  kCalibrationHigh,
  kCalibrationLow,
  kCalibrationBoth,
  kCalibrationCross,
  kCriteriaPlusCalibration,
};

enum class CalibrationVariant { kHigh, kLow, kBoth, kCross };

std::string_view calibration_variant_name(CalibrationVariant v);
std::optional<CalibrationVariant> parse_calibration_variant(std::string_view s);

bool kind_uses_criteria(PromptKind kind);
bool kind_uses_calibration(PromptKind kind);
// Fixed variant for the four single-technique calibration kinds.
std::optional<CalibrationVariant> fixed_calibration_variant(PromptKind kind);

struct CalibrationReference {
  std::string query;
  std::string response;
  int score = 0;  // 1..10
};

struct CalibrationBlock {
  CalibrationVariant variant = CalibrationVariant::kHigh;
  // kBoth: {high, low} in that order; otherwise exactly one entry.
  std::vector<CalibrationReference> references;
};

struct PromptVariant {
  PromptKind kind = PromptKind::kBase;
  std::optional<std::string> criterion_text;
  std::optional<CalibrationBlock> calibration;
};

// Throws Error(kConfig) if the variant's optional parts disagree with kind.
void validate(const PromptVariant& variant);

// What a condition manifest names: the kind plus, for the stacked kind, which
// calibration variant it stacks with. Criterion and calibration payloads are
// filled in per example at run time.
struct PromptVariantSpec {
  PromptKind kind = PromptKind::kBase;
  CalibrationVariant calibration = CalibrationVariant::kLow;

  std::optional<CalibrationVariant> calibration_variant() const;
  friend bool operator==(const PromptVariantSpec&,
                         const PromptVariantSpec&) = default;
};

// "base", "criteria", "calibration_high", ..., "criteria+calibration_low".
std::string to_string(const PromptVariantSpec& spec);
PromptVariantSpec parse_prompt_variant_spec(std::string_view s);

// Category-specific criterion sentences, fixed at build time.
class CriteriaTable {
 public:
  static const CriteriaTable& builtin();
  const std::string& criterion(Category c) const { return texts_.at(c); }
  const std::map<Category, std::string>& entries() const { return texts_; }

 private:
  CriteriaTable();
  std::map<Category, std::string> texts_;
};

// Canonical template texts. Exposed so tests can diff them against the
// shipped assets/prompts fixtures.
namespace templates {
extern const std::string_view kJudge;
extern const std::string_view kCalibrationIntroSingle;
extern const std::string_view kCalibrationIntroBoth;
extern const std::string_view kCalibrationIntroCross;
extern const std::string_view kCalibrationExample;
extern const std::string_view kCalibrationOutro;
}  // namespace templates

// Pure. Throws Error(kConfig) on an invalid variant.
std::string render_prompt(std::string_view query, std::string_view response,
                          const PromptVariant& variant);

struct CalibrationPick {
  std::string example_id;
  int response_index = 0;
  friend bool operator==(const CalibrationPick&,
                         const CalibrationPick&) = default;
};

// Returns one pick (two for kBoth, high first). Never returns the target.
// Throws Error(kSelection) naming the category when the pool is empty.
std::vector<CalibrationPick> select_calibration_reference(
    const Dataset& dataset, const Example& target, CalibrationVariant variant,
    Rng& rng);

}  // namespace judgekit
