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
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgekit/costing.hpp"
#include "judgekit/dataset.hpp"
#include "judgekit/escalation.hpp"
#include "judgekit/judge_backend.hpp"
#include "judgekit/prompting.hpp"
#include "judgekit/protocol.hpp"
#include "judgekit/stats.hpp"

namespace judgekit {

enum class RecordStatus { kOk, kRefused, kFailed };
// kCalibration records hold the one-off scoring of a calibration reference.
enum class RecordKind { kJudge, kCalibration };

struct ScoreRecord {
  std::string example_id;
  Category category = Category::kFactuality;
  std::string condition_id;
  std::string model_id;
  int response_index = 0;
  int sample_index = 0;
  int score = 0;  // 0 unless status == kOk
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double temperature = 1.0;
  std::string prompt_variant;
  std::int64_t timestamp_ms = 0;
  RecordStatus status = RecordStatus::kOk;
  RecordKind kind = RecordKind::kJudge;
  int chosen_index = 0;
  int attempts = 1;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

using RecordKey = std::tuple<std::string, std::string, RecordKind, int, int>;
RecordKey key_of(const ScoreRecord& r);

nlohmann::json record_to_json(const ScoreRecord& r);
ScoreRecord record_from_json(const nlohmann::json& j);

struct ConditionConfig {
  std::string condition_id;
  std::string model_id;
  int k = 1;
  double temperature = 1.0;
  PromptVariantSpec prompt_variant;
  std::uint64_t seed = 0;
  int max_concurrency = 4;
  int max_output_tokens = 4096;
  std::string reasoning_effort = "none";
  // Model used to score calibration references; defaults to model_id.
  std::string calibration_model_id;

  const std::string& calibration_model() const {
    return calibration_model_id.empty() ? model_id : calibration_model_id;
  }
};

void validate(const ConditionConfig& config);
nlohmann::json condition_to_json(const ConditionConfig& c);
ConditionConfig condition_from_json(const nlohmann::json& j);
// A manifest is a JSON array of conditions (or {"conditions": [...]}).
std::vector<ConditionConfig> load_manifest(const std::filesystem::path& path);
// Two configs collide when everything except max_concurrency is equal.
bool same_experiment(const ConditionConfig& a, const ConditionConfig& b);

// Append-only, line-delimited store of condition headers and score records.
// Appends are serialized through an internal mutex; one store object should
// own a file at a time.
class RecordStore {
 public:
  // Loads existing content (if any) and opens the file for appending.
  explicit RecordStore(std::filesystem::path path);
  // In-memory store (tests and analysis of synthetic data).
  RecordStore() = default;
  RecordStore(RecordStore&& other) noexcept;
  RecordStore& operator=(RecordStore&&) = delete;

  static RecordStore parse(const std::string& text);
  std::string serialize() const;

  // Registers a condition header. Throws Error(kConfig) when a different
  // configuration already owns the id.
  void register_condition(const ConditionConfig& config);
  void append(const ScoreRecord& record);
  void append(const std::vector<ScoreRecord>& records);

  std::vector<ScoreRecord> records() const;
  std::vector<ScoreRecord> records_for(const std::string& condition_id) const;
  std::map<std::string, ConditionConfig> conditions() const;
  std::optional<ConditionConfig> condition(const std::string& id) const;
  std::size_t size() const;

 private:
  void append_line(const std::string& line);

  std::filesystem::path path_;
  std::unique_ptr<std::ofstream> out_;
  mutable std::mutex mu_;
  std::vector<ScoreRecord> records_;
  std::map<std::string, ConditionConfig> conditions_;
  std::set<RecordKey> keys_;
};

struct RunOptions {
  RetryPolicy retry;
  Sleeper sleeper = real_sleeper();
};

struct RunSummary {
  std::size_t new_records = 0;
  std::size_t ok_examples = 0;
  std::size_t refused_examples = 0;
  std::size_t failed_examples = 0;
};

// Scores every example under the condition. Resumable: keys already in the
// store are not requested again. On a backend error the records written so far
// stay in the store and the error is rethrown.
RunSummary run_condition(const Dataset& dataset, const ConditionConfig& config,
                         JudgeBackend& backend, RecordStore& store,
                         const RunOptions& options = {});

// Per-condition view of a store.
struct ConditionData {
  ConditionConfig config;
  // Complete 4 x k matrices, sorted by example id.
  std::vector<JudgedMatrix> matrices;
  std::map<std::string, Category> categories;
  std::set<std::string> refused;
  std::set<std::string> failed;
  std::set<std::string> incomplete;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double dollars = 0.0;

  std::size_t attempted() const {
    return matrices.size() + refused.size() + failed.size() + incomplete.size();
  }
  double dollars_per_example() const {
    return attempted() == 0 ? 0.0 : dollars / static_cast<double>(attempted());
  }
};

ConditionData collect_condition(const RecordStore& store,
                                const std::string& condition_id,
                                const PricingTable& pricing);

struct AccuracyCell {
  std::size_t n = 0;
  double accuracy = 0.0;
  double tie_rate = 0.0;
  BootstrapResult ci;
};

struct ConditionReport {
  std::string condition_id;
  std::string model_id;
  int k = 0;
  double temperature = 0.0;
  std::string prompt_variant;
  std::size_t refused = 0;
  std::size_t failed = 0;
  std::size_t incomplete = 0;
  AccuracyCell overall;
  std::map<Category, AccuracyCell> by_category;
  CostLedger ledger;
  // P(this condition > baseline) over examples both scored; absent for the
  // baseline itself.
  std::optional<ComparisonResult> vs_baseline;
};

struct ReportOptions {
  bool intersection = false;
  int n_resamples = kDefaultResamples;
  std::uint64_t seed = 0;
  PricingTable pricing = PricingTable::builtin();
};

struct Report {
  std::string baseline_condition_id;
  bool intersection = false;
  std::size_t intersection_size = 0;
  std::vector<ConditionReport> conditions;
};

// Throws Error(kConfig) when the baseline (or any listed condition) has no
// records.
Report build_report(const RecordStore& store,
                    const std::vector<std::string>& condition_ids,
                    const std::string& baseline_condition_id,
                    const ReportOptions& options = {});

std::string format_report_tsv(const Report& report);
nlohmann::json report_to_json(const Report& report);

struct TemperatureRow {
  double temperature = 0.0;
  std::string k1_condition;
  std::string kmax_condition;
  AccuracyCell k1;
  AccuracyCell kmax;
  double gap = 0.0;  // kmax accuracy minus k=1 accuracy
};

// Runs base_config at every temperature with k = 1 and k = k_max (the
// base_config's k). Condition ids are "<id>_t<temp>_k<k>".
std::vector<TemperatureRow> run_temperature_sweep(
    const Dataset& dataset, const ConditionConfig& base_config,
    const std::vector<double>& temperatures, JudgeBackend& backend,
    RecordStore& store, const RunOptions& options = {},
    const ReportOptions& report_options = {});

std::string format_temperature_tsv(const std::vector<TemperatureRow>& rows);

// Pairs two conditions' complete matrices by example id.
std::vector<PairedScores> pair_conditions(const RecordStore& store,
                                          const std::string& mini_condition,
                                          const std::string& full_condition,
                                          const PricingTable& pricing);

}  // namespace judgekit
