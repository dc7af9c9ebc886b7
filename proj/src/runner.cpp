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

#include "judgekit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "judgekit/errors.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/scoring.hpp"

namespace judgekit {

// ---------------------------------------------------------------------------
// Records

namespace {

std::string_view status_name(RecordStatus s) {
  switch (s) {
    case RecordStatus::kOk: return "ok";
    case RecordStatus::kRefused: return "refused";
    case RecordStatus::kFailed: return "failed";
  }
  return "?";
}

RecordStatus parse_status(const std::string& s) {
  if (s == "ok") return RecordStatus::kOk;
  if (s == "refused") return RecordStatus::kRefused;
  if (s == "failed") return RecordStatus::kFailed;
  fail(ErrorCode::kValidation, "unknown record status '" + s + "'");
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

RecordKey key_of(const ScoreRecord& r) {
  return {r.example_id, r.condition_id, r.kind, r.response_index, r.sample_index};
}

nlohmann::json record_to_json(const ScoreRecord& r) {
  nlohmann::json j = {
      {"type", "score"},
      {"example_id", r.example_id},
      {"category", std::string(category_name(r.category))},
      {"condition_id", r.condition_id},
      {"model_id", r.model_id},
      {"kind", r.kind == RecordKind::kJudge ? "judge" : "calibration"},
      {"response_index", r.response_index},
      {"sample_index", r.sample_index},
      {"score", r.score},
      {"input_tokens", r.input_tokens},
      {"output_tokens", r.output_tokens},
      {"temperature", r.temperature},
      {"prompt_variant", r.prompt_variant},
      {"timestamp_ms", r.timestamp_ms},
      {"status", std::string(status_name(r.status))},
      {"chosen_index", r.chosen_index},
      {"attempts", r.attempts},
  };
  return j;
}

ScoreRecord record_from_json(const nlohmann::json& j) {
  ScoreRecord r;
  try {
    r.example_id = j.at("example_id").get<std::string>();
    const auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) fail(ErrorCode::kValidation, "record has unknown category");
    r.category = *cat;
    r.condition_id = j.at("condition_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    const std::string kind = j.value("kind", "judge");
    if (kind == "judge") {
      r.kind = RecordKind::kJudge;
    } else if (kind == "calibration") {
      r.kind = RecordKind::kCalibration;
    } else {
      fail(ErrorCode::kValidation, "unknown record kind '" + kind + "'");
    }
    r.response_index = j.at("response_index").get<int>();
    r.sample_index = j.at("sample_index").get<int>();
    r.score = j.at("score").get<int>();
    r.input_tokens = j.at("input_tokens").get<std::int64_t>();
    r.output_tokens = j.at("output_tokens").get<std::int64_t>();
    r.temperature = j.at("temperature").get<double>();
    r.prompt_variant = j.at("prompt_variant").get<std::string>();
    r.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    r.status = parse_status(j.at("status").get<std::string>());
    r.chosen_index = j.value("chosen_index", 0);
    r.attempts = j.value("attempts", 1);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kValidation, std::string("malformed score record: ") + e.what());
  }
  if (r.response_index < 0 || r.response_index > 3 || r.sample_index < 0) {
    fail(ErrorCode::kValidation, "record index out of range");
  }
  if (r.status == RecordStatus::kOk && (r.score < 1 || r.score > 10)) {
    fail(ErrorCode::kValidation, "ok record without a valid score");
  }
  if (r.status != RecordStatus::kOk && r.score != 0) {
    fail(ErrorCode::kValidation, "refused/failed record carries a score");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Conditions

void validate(const ConditionConfig& c) {
  if (c.condition_id.empty()) fail(ErrorCode::kConfig, "condition_id is empty");
  if (c.model_id.empty()) fail(ErrorCode::kConfig, "model_id is empty");
  if (c.k < 1) fail(ErrorCode::kConfig, "k must be >= 1");
  if (c.temperature < 0.0) fail(ErrorCode::kConfig, "temperature must be >= 0");
  if (c.max_concurrency < 1) fail(ErrorCode::kConfig, "max_concurrency must be >= 1");
  if (c.max_output_tokens < 1) fail(ErrorCode::kConfig, "max_output_tokens must be >= 1");
}

nlohmann::json condition_to_json(const ConditionConfig& c) {
  nlohmann::json j = {
      {"condition_id", c.condition_id},
      {"model_id", c.model_id},
      {"k", c.k},
      {"temperature", c.temperature},
      {"prompt_variant", to_string(c.prompt_variant)},
      {"seed", c.seed},
      {"max_concurrency", c.max_concurrency},
      {"max_output_tokens", c.max_output_tokens},
      {"reasoning_effort", c.reasoning_effort},
  };
  if (!c.calibration_model_id.empty()) {
    j["calibration_model_id"] = c.calibration_model_id;
  }
  return j;
}

ConditionConfig condition_from_json(const nlohmann::json& j) {
  ConditionConfig c;
  try {
    c.condition_id = j.at("condition_id").get<std::string>();
    c.model_id = j.at("model_id").get<std::string>();
    c.k = j.value("k", 1);
    c.temperature = j.value("temperature", 1.0);
    c.prompt_variant =
        parse_prompt_variant_spec(j.value("prompt_variant", std::string("base")));
    c.seed = j.value("seed", std::uint64_t{0});
    c.max_concurrency = j.value("max_concurrency", 4);
    c.max_output_tokens = j.value("max_output_tokens", 4096);
    c.reasoning_effort = j.value("reasoning_effort", std::string("none"));
    c.calibration_model_id = j.value("calibration_model_id", std::string());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed condition: ") + e.what());
  }
  validate(c);
  return c;
}

std::vector<ConditionConfig> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, "malformed manifest: " + std::string(e.what()));
  }
  if (doc.is_object() && doc.contains("conditions")) doc = doc["conditions"];
  if (!doc.is_array()) fail(ErrorCode::kConfig, "manifest must list conditions");
  std::vector<ConditionConfig> out;
  std::set<std::string> ids;
  for (const auto& item : doc) {
    out.push_back(condition_from_json(item));
    if (!ids.insert(out.back().condition_id).second) {
      fail(ErrorCode::kConfig,
           "duplicate condition_id '" + out.back().condition_id + "' in manifest");
    }
  }
  return out;
}

bool same_experiment(const ConditionConfig& a, const ConditionConfig& b) {
  auto ja = condition_to_json(a);
  auto jb = condition_to_json(b);
  ja.erase("max_concurrency");
  jb.erase("max_concurrency");
  return ja == jb;
}

// ---------------------------------------------------------------------------
// Store

RecordStore::RecordStore(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot read store '" + path_.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    RecordStore parsed = parse(buf.str());
    records_ = std::move(parsed.records_);
    conditions_ = std::move(parsed.conditions_);
    keys_ = std::move(parsed.keys_);
  }
  out_ = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::app);
  if (!*out_) fail(ErrorCode::kIo, "cannot open store '" + path_.string() + "'");
}

RecordStore::RecordStore(RecordStore&& other) noexcept {
  std::lock_guard lock(other.mu_);
  path_ = std::move(other.path_);
  out_ = std::move(other.out_);
  records_ = std::move(other.records_);
  conditions_ = std::move(other.conditions_);
  keys_ = std::move(other.keys_);
}

RecordStore RecordStore::parse(const std::string& text) {
  RecordStore store;
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::kValidation,
           "store line " + std::to_string(line_number) + " is not valid JSON");
    }
    const std::string type = j.value("type", "score");
    if (type == "condition") {
      ConditionConfig c = condition_from_json(j.at("config"));
      store.conditions_[c.condition_id] = c;
      continue;
    }
    ScoreRecord r = record_from_json(j);
    if (!store.keys_.insert(key_of(r)).second) {
      fail(ErrorCode::kValidation,
           "store line " + std::to_string(line_number) + " duplicates a record key");
    }
    store.records_.push_back(std::move(r));
  }
  return store;
}

std::string RecordStore::serialize() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& [id, c] : conditions_) {
    out += nlohmann::json{{"type", "condition"}, {"config", condition_to_json(c)}}.dump();
    out += '\n';
  }
  for (const ScoreRecord& r : records_) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

void RecordStore::append_line(const std::string& line) {
  if (!out_) return;
  *out_ << line << '\n';
  out_->flush();
  if (!*out_) fail(ErrorCode::kIo, "write to store '" + path_.string() + "' failed");
}

void RecordStore::register_condition(const ConditionConfig& config) {
  validate(config);
  std::lock_guard lock(mu_);
  if (auto it = conditions_.find(config.condition_id); it != conditions_.end()) {
    if (!same_experiment(it->second, config)) {
      fail(ErrorCode::kConfig, "condition '" + config.condition_id +
                                   "' already exists in the store with a "
                                   "different configuration");
    }
    return;
  }
  conditions_[config.condition_id] = config;
  append_line(
      nlohmann::json{{"type", "condition"}, {"config", condition_to_json(config)}}
          .dump());
}

void RecordStore::append(const ScoreRecord& record) {
  std::lock_guard lock(mu_);
  if (!keys_.insert(key_of(record)).second) {
    fail(ErrorCode::kValidation, "record for '" + record.example_id +
                                     "' already present in condition '" +
                                     record.condition_id + "'");
  }
  records_.push_back(record);
  append_line(record_to_json(record).dump());
}

void RecordStore::append(const std::vector<ScoreRecord>& records) {
  for (const ScoreRecord& r : records) append(r);
}

std::vector<ScoreRecord> RecordStore::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<ScoreRecord> RecordStore::records_for(const std::string& id) const {
  std::lock_guard lock(mu_);
  std::vector<ScoreRecord> out;
  for (const ScoreRecord& r : records_) {
    if (r.condition_id == id) out.push_back(r);
  }
  return out;
}

std::map<std::string, ConditionConfig> RecordStore::conditions() const {
  std::lock_guard lock(mu_);
  return conditions_;
}

std::optional<ConditionConfig> RecordStore::condition(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = conditions_.find(id);
  if (it == conditions_.end()) return std::nullopt;
  return it->second;
}

std::size_t RecordStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

// ---------------------------------------------------------------------------
// Running a condition

namespace {

struct CalibrationScore {
  bool ok = false;
  int score = 0;
  std::string message;
};

using CalibrationKey = std::tuple<std::string, int, std::string>;

// What the store already holds for one example under the condition.
struct ExistingState {
  bool terminal = false;  // a refused/failed record exists
  std::array<std::set<int>, kResponsesPerExample> ok_samples;
};

class ConditionRun {
 public:
  ConditionRun(const Dataset& dataset, const ConditionConfig& config,
               JudgeBackend& backend, RecordStore& store, const RunOptions& options)
      : dataset_(dataset),
        config_(config),
        backend_(backend),
        store_(store),
        options_(options),
        variant_name_(to_string(config.prompt_variant)) {
    for (const ScoreRecord& r : store.records_for(config.condition_id)) {
      if (r.kind == RecordKind::kCalibration) {
        std::promise<CalibrationScore> p;
        p.set_value({r.status == RecordStatus::kOk, r.score,
                     "calibration reference '" + r.example_id + "' not scored"});
        calibration_cache_[{r.example_id, r.response_index, r.model_id}] =
            p.get_future().share();
        continue;
      }
      ExistingState& s = existing_[r.example_id];
      if (r.status != RecordStatus::kOk) {
        s.terminal = true;
      } else {
        s.ok_samples[r.response_index].insert(r.sample_index);
      }
    }
  }

  RunSummary run() {
    const auto& examples = dataset_.examples();
    const int workers = std::max(
        1, std::min<int>(config_.max_concurrency, static_cast<int>(examples.size())));
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          while (!abort_.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= examples.size()) break;
            try {
              process(examples[i]);
            } catch (...) {
              std::lock_guard lock(error_mu_);
              if (!error_) error_ = std::current_exception();
              abort_.store(true);
            }
          }
        });
      }
    }
    if (error_) std::rethrow_exception(error_);
    return summary_;
  }

 private:
  ScoreRecord base_record(const Example& ex, RecordKind kind) const {
    ScoreRecord r;
    r.example_id = ex.id;
    r.category = ex.category;
    r.condition_id = config_.condition_id;
    r.model_id = config_.model_id;
    r.temperature = config_.temperature;
    r.prompt_variant = variant_name_;
    r.kind = kind;
    r.chosen_index = ex.chosen_index;
    return r;
  }

  void write(std::vector<ScoreRecord> records) {
    const std::int64_t ts = now_ms();
    for (ScoreRecord& r : records) r.timestamp_ms = ts;
    store_.append(records);
    std::lock_guard lock(summary_mu_);
    summary_.new_records += records.size();
  }

  void count(RecordStatus status) {
    std::lock_guard lock(summary_mu_);
    switch (status) {
      case RecordStatus::kOk: ++summary_.ok_examples; break;
      case RecordStatus::kRefused: ++summary_.refused_examples; break;
      case RecordStatus::kFailed: ++summary_.failed_examples; break;
    }
  }

  JudgeRequest make_request(const std::string& prompt, const std::string& model,
                            const std::string& example_id, int response,
                            int first_sample, int n, std::uint64_t seed) const {
    JudgeRequest req;
    req.prompt = prompt;
    req.n_completions = n;
    req.temperature = config_.temperature;
    req.max_output_tokens = config_.max_output_tokens;
    req.reasoning_effort = config_.reasoning_effort;
    req.model_id = model;
    req.tag.example_id = example_id;
    req.tag.response_index = response;
    req.tag.first_sample = first_sample;
    req.tag.seed = seed;
    return req;
  }

  CalibrationScore score_reference(const CalibrationPick& pick) {
    const CalibrationKey key{pick.example_id, pick.response_index,
                             config_.calibration_model()};
    std::promise<CalibrationScore> promise;
    std::shared_future<CalibrationScore> future;
    bool owner = false;
    {
      std::lock_guard lock(cache_mu_);
      auto it = calibration_cache_.find(key);
      if (it == calibration_cache_.end()) {
        future = promise.get_future().share();
        calibration_cache_.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (!owner) return future.get();

    try {
      const Example& ref = dataset_.at(pick.example_id);
      PromptVariant base;
      const std::string prompt =
          render_prompt(ref.query, ref.responses[pick.response_index], base);
      const JudgeRequest req =
          make_request(prompt, config_.calibration_model(), ref.id,
                       pick.response_index, 0, 1,
                       combine_seed(config_.seed, hash_string("calibration")));
      RowOutcome row = score_row(backend_, req, options_.retry, options_.sleeper);

      ScoreRecord rec = base_record(ref, RecordKind::kCalibration);
      rec.model_id = config_.calibration_model();
      rec.response_index = pick.response_index;
      rec.prompt_variant = "base";
      CalibrationScore result;
      if (row.status == RowStatus::kOk) {
        rec.score = row.samples[0].score;
        rec.input_tokens = row.samples[0].input_tokens;
        rec.output_tokens = row.samples[0].output_tokens;
        rec.attempts = row.samples[0].attempts;
        result = {true, rec.score, {}};
      } else {
        rec.status = row.status == RowStatus::kRefused ? RecordStatus::kRefused
                                                       : RecordStatus::kFailed;
        rec.input_tokens = row.lost_input_tokens;
        rec.output_tokens = row.lost_output_tokens;
        for (const auto& s : row.samples) {
          rec.input_tokens += s.input_tokens;
          rec.output_tokens += s.output_tokens;
        }
        result = {false, 0, "calibration reference '" + ref.id + "': " + row.message};
      }
      write({rec});
      promise.set_value(result);
      return result;
    } catch (...) {
      promise.set_exception(std::current_exception());
      throw;
    }
  }

  // Fills the per-example variant; returns false (after recording a failure)
  // when a calibration reference could not be scored.
  bool build_variant(const Example& ex, PromptVariant& variant) {
    variant.kind = config_.prompt_variant.kind;
    if (kind_uses_criteria(variant.kind)) {
      variant.criterion_text = CriteriaTable::builtin().criterion(ex.category);
    }
    const auto cal = config_.prompt_variant.calibration_variant();
    if (!cal) return true;
    Rng rng(combine_seed(combine_seed(config_.seed, hash_string(ex.id)),
                         hash_string("calibration-pick")));
    CalibrationBlock block;
    block.variant = *cal;
    for (const CalibrationPick& pick :
         select_calibration_reference(dataset_, ex, *cal, rng)) {
      const CalibrationScore s = score_reference(pick);
      if (!s.ok) {
        ScoreRecord rec = base_record(ex, RecordKind::kJudge);
        rec.status = RecordStatus::kFailed;
        write({rec});
        count(RecordStatus::kFailed);
        return false;
      }
      const Example& ref = dataset_.at(pick.example_id);
      block.references.push_back(
          {ref.query, ref.responses[pick.response_index], s.score});
    }
    variant.calibration = std::move(block);
    return true;
  }

  void process(const Example& ex) {
    const ExistingState empty;
    auto found = existing_.find(ex.id);
    const ExistingState& state = found == existing_.end() ? empty : found->second;
    if (state.terminal) return;

    bool complete = true;
    for (const auto& s : state.ok_samples) {
      if (static_cast<int>(s.size()) < config_.k) complete = false;
    }
    if (complete) return;

    PromptVariant variant;
    if (!build_variant(ex, variant)) return;

    for (int i = 0; i < static_cast<int>(kResponsesPerExample); ++i) {
      const std::string prompt = render_prompt(ex.query, ex.responses[i], variant);
      // Contiguous runs of missing sample slots, one request per run.
      int j = 0;
      while (j < config_.k) {
        if (state.ok_samples[i].count(j)) {
          ++j;
          continue;
        }
        int end = j;
        while (end < config_.k && !state.ok_samples[i].count(end)) ++end;
        const JudgeRequest req = make_request(prompt, config_.model_id, ex.id, i,
                                              j, end - j, config_.seed);
        RowOutcome row = score_row(backend_, req, options_.retry, options_.sleeper);
        if (row.status != RowStatus::kOk) {
          ScoreRecord rec = base_record(ex, RecordKind::kJudge);
          rec.response_index = i;
          rec.sample_index = j;
          rec.status = row.status == RowStatus::kRefused ? RecordStatus::kRefused
                                                         : RecordStatus::kFailed;
          rec.input_tokens = row.lost_input_tokens;
          rec.output_tokens = row.lost_output_tokens;
          for (const auto& s : row.samples) {
            rec.input_tokens += s.input_tokens;
            rec.output_tokens += s.output_tokens;
          }
          write({rec});
          count(rec.status);
          return;
        }
        std::vector<ScoreRecord> out;
        for (int s = 0; s < end - j; ++s) {
          ScoreRecord rec = base_record(ex, RecordKind::kJudge);
          rec.response_index = i;
          rec.sample_index = j + s;
          rec.score = row.samples[s].score;
          rec.input_tokens = row.samples[s].input_tokens;
          rec.output_tokens = row.samples[s].output_tokens;
          rec.attempts = row.samples[s].attempts;
          out.push_back(std::move(rec));
        }
        write(std::move(out));
        j = end;
      }
    }
    count(RecordStatus::kOk);
  }

  const Dataset& dataset_;
  const ConditionConfig& config_;
  JudgeBackend& backend_;
  RecordStore& store_;
  const RunOptions& options_;
  const std::string variant_name_;

  std::map<std::string, ExistingState> existing_;

  std::mutex cache_mu_;
  std::map<CalibrationKey, std::shared_future<CalibrationScore>> calibration_cache_;

  std::mutex summary_mu_;
  RunSummary summary_;

  std::atomic<bool> abort_{false};
  std::mutex error_mu_;
  std::exception_ptr error_;
};

}  // namespace

RunSummary run_condition(const Dataset& dataset, const ConditionConfig& config,
                         JudgeBackend& backend, RecordStore& store,
                         const RunOptions& options) {
  validate(config);
  store.register_condition(config);
  ConditionRun run(dataset, config, backend, store, options);
  return run.run();
}

// ---------------------------------------------------------------------------
// Analysis

ConditionData collect_condition(const RecordStore& store,
                                const std::string& condition_id,
                                const PricingTable& pricing) {
  auto config = store.condition(condition_id);
  if (!config) {
    fail(ErrorCode::kConfig, "condition '" + condition_id + "' is not in the store");
  }
  ConditionData data;
  data.config = *config;

  struct Rows {
    std::array<std::map<int, int>, kResponsesPerExample> samples;
    int chosen_index = 0;
  };
  std::map<std::string, Rows> rows;
  // Integer token totals per model, priced once, so the dollar figure does not
  // depend on record order.
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> tokens_by_model;
  for (const ScoreRecord& r : store.records_for(condition_id)) {
    data.input_tokens += r.input_tokens;
    data.output_tokens += r.output_tokens;
    auto& [in, out] = tokens_by_model[r.model_id];
    in += r.input_tokens;
    out += r.output_tokens;
    if (r.kind == RecordKind::kCalibration) continue;
    data.categories[r.example_id] = r.category;
    if (r.status == RecordStatus::kRefused) {
      data.refused.insert(r.example_id);
    } else if (r.status == RecordStatus::kFailed) {
      data.failed.insert(r.example_id);
    }
    Rows& row = rows[r.example_id];
    row.chosen_index = r.chosen_index;
    if (r.status == RecordStatus::kOk) {
      row.samples[r.response_index][r.sample_index] = r.score;
    }
  }
  for (const std::string& id : data.refused) data.failed.erase(id);
  for (const auto& [model, t] : tokens_by_model) {
    const std::int64_t out[] = {t.second};
    data.dollars += call_cost(t.first, out, pricing.at(model));
  }

  const int k = config->k;
  for (auto& [id, row] : rows) {
    if (data.refused.count(id) || data.failed.count(id)) continue;
    std::array<std::vector<int>, kResponsesPerExample> scores;
    bool complete = true;
    for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
      for (int s = 0; s < k; ++s) {
        auto it = row.samples[i].find(s);
        if (it == row.samples[i].end()) {
          complete = false;
          break;
        }
        scores[i].push_back(it->second);
      }
      if (!complete) break;
    }
    if (!complete) {
      data.incomplete.insert(id);
      continue;
    }
    data.matrices.push_back({assemble_matrix(id, std::move(scores)), row.chosen_index});
  }
  return data;
}

namespace {

std::vector<std::uint8_t> correctness_flags(std::span<const JudgedMatrix> matrices) {
  std::vector<std::uint8_t> flags;
  flags.reserve(matrices.size());
  for (const JudgedMatrix& jm : matrices) {
    flags.push_back(judge_example(jm.matrix, jm.chosen_index).correct ? 1 : 0);
  }
  return flags;
}

AccuracyCell accuracy_cell(std::span<const JudgedMatrix> matrices,
                           const ReportOptions& options) {
  AccuracyCell cell;
  cell.n = matrices.size();
  if (matrices.empty()) return cell;
  std::vector<Verdict> verdicts;
  for (const JudgedMatrix& jm : matrices) {
    verdicts.push_back(judge_example(jm.matrix, jm.chosen_index));
  }
  const ConditionMetrics m = condition_metrics(verdicts);
  cell.accuracy = m.accuracy;
  cell.tie_rate = m.tie_rate;
  const auto flags = correctness_flags(matrices);
  cell.ci = bootstrap_ci(flags, options.n_resamples, 0.95, options.seed);
  return cell;
}

}  // namespace

Report build_report(const RecordStore& store,
                    const std::vector<std::string>& condition_ids,
                    const std::string& baseline_condition_id,
                    const ReportOptions& options) {
  if (!store.condition(baseline_condition_id)) {
    fail(ErrorCode::kConfig,
         "baseline condition '" + baseline_condition_id + "' is not in the store");
  }
  std::vector<std::string> ids = condition_ids;
  if (std::find(ids.begin(), ids.end(), baseline_condition_id) == ids.end()) {
    ids.insert(ids.begin(), baseline_condition_id);
  }

  std::map<std::string, ConditionData> data;
  for (const std::string& id : ids) {
    data.emplace(id, collect_condition(store, id, options.pricing));
  }
  const ConditionData& base = data.at(baseline_condition_id);
  if (base.attempted() == 0 || base.dollars <= 0.0) {
    fail(ErrorCode::kConfig,
         "baseline condition '" + baseline_condition_id + "' has no billed records");
  }

  Report report;
  report.baseline_condition_id = baseline_condition_id;
  report.intersection = options.intersection;

  std::optional<std::set<std::string>> shared;
  if (options.intersection) {
    for (const std::string& id : ids) {
      std::set<std::string> ok;
      for (const JudgedMatrix& jm : data.at(id).matrices) ok.insert(jm.matrix.example_id());
      if (!shared) {
        shared = std::move(ok);
      } else {
        std::set<std::string> both;
        std::set_intersection(shared->begin(), shared->end(), ok.begin(), ok.end(),
                              std::inserter(both, both.end()));
        shared = std::move(both);
      }
    }
    report.intersection_size = shared->size();
  }

  auto restrict = [&](const ConditionData& d) {
    std::vector<JudgedMatrix> out;
    for (const JudgedMatrix& jm : d.matrices) {
      if (!shared || shared->count(jm.matrix.example_id())) out.push_back(jm);
    }
    return out;
  };

  const std::vector<JudgedMatrix> base_matrices = restrict(base);
  std::map<std::string, std::uint8_t> base_flags;
  for (const JudgedMatrix& jm : base_matrices) {
    base_flags[jm.matrix.example_id()] =
        judge_example(jm.matrix, jm.chosen_index).correct ? 1 : 0;
  }

  for (const std::string& id : ids) {
    const ConditionData& d = data.at(id);
    const std::vector<JudgedMatrix> matrices = restrict(d);
    ConditionReport row;
    row.condition_id = id;
    row.model_id = d.config.model_id;
    row.k = d.config.k;
    row.temperature = d.config.temperature;
    row.prompt_variant = to_string(d.config.prompt_variant);
    row.refused = d.refused.size();
    row.failed = d.failed.size();
    row.incomplete = d.incomplete.size();
    row.overall = accuracy_cell(matrices, options);
    for (Category c : kAllCategories) {
      std::vector<JudgedMatrix> subset;
      for (const JudgedMatrix& jm : matrices) {
        if (d.categories.at(jm.matrix.example_id()) == c) subset.push_back(jm);
      }
      row.by_category[c] = accuracy_cell(subset, options);
    }
    row.ledger.condition_id = id;
    row.ledger.total_input_tokens = d.input_tokens;
    row.ledger.total_output_tokens = d.output_tokens;
    row.ledger.dollars = d.dollars;
    row.ledger.baseline_dollars = base.dollars;
    row.ledger.ratio_to_baseline =
        d.attempted() == 0
            ? 0.0
            : condition_ratio(d.dollars_per_example(), base.dollars_per_example());

    if (id != baseline_condition_id) {
      std::vector<std::uint8_t> a, b;
      for (const JudgedMatrix& jm : matrices) {
        auto it = base_flags.find(jm.matrix.example_id());
        if (it == base_flags.end()) continue;
        a.push_back(judge_example(jm.matrix, jm.chosen_index).correct ? 1 : 0);
        b.push_back(it->second);
      }
      if (!a.empty()) {
        row.vs_baseline = paired_bootstrap(a, b, options.n_resamples, options.seed);
      }
    }
    report.conditions.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string pct_or_na(const AccuracyCell& cell, double value) {
  return cell.n == 0 ? "NA" : fmt::format("{:.4f}", 100.0 * value);
}

}  // namespace

std::string format_report_tsv(const Report& report) {
  std::string out =
      "condition\tmodel\tk\ttemperature\tprompt_variant\tn\trefused\tfailed\t"
      "incomplete\taccuracy_pct\tci_low_pct\tci_high_pct\tci_half_width_pp\t"
      "tie_rate_pct\tcost_ratio\tp_gt_baseline";
  for (Category c : kAllCategories) {
    const auto name = category_name(c);
    out += fmt::format("\t{0}_n\t{0}_accuracy_pct\t{0}_ci_half_width_pp", name);
  }
  out += '\n';
  for (const ConditionReport& r : report.conditions) {
    const AccuracyCell& o = r.overall;
    out += fmt::format("{}\t{}\t{}\t{:.2f}\t{}\t{}\t{}\t{}\t{}", r.condition_id,
                       r.model_id, r.k, r.temperature, r.prompt_variant, o.n,
                       r.refused, r.failed, r.incomplete);
    out += fmt::format("\t{}\t{}\t{}\t{}\t{}", pct_or_na(o, o.accuracy),
                       pct_or_na(o, o.ci.ci_low), pct_or_na(o, o.ci.ci_high),
                       pct_or_na(o, o.ci.half_width), pct_or_na(o, o.tie_rate));
    out += fmt::format("\t{:.4f}\t{}", r.ledger.ratio_to_baseline,
                       r.vs_baseline ? fmt::format("{:.4f}", r.vs_baseline->p_a_gt_b)
                                     : std::string("NA"));
    for (Category c : kAllCategories) {
      const AccuracyCell& cell = r.by_category.at(c);
      out += fmt::format("\t{}\t{}\t{}", cell.n, pct_or_na(cell, cell.accuracy),
                         pct_or_na(cell, cell.ci.half_width));
    }
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json cell_to_json(const AccuracyCell& c) {
  if (c.n == 0) return {{"n", 0}, {"empty", true}};
  return {{"n", c.n},
          {"accuracy", c.accuracy},
          {"tie_rate", c.tie_rate},
          {"ci_low", c.ci.ci_low},
          {"ci_high", c.ci.ci_high},
          {"ci_half_width", c.ci.half_width},
          {"n_resamples", c.ci.n_resamples},
          {"seed", c.ci.seed}};
}

}  // namespace

nlohmann::json report_to_json(const Report& report) {
  nlohmann::json j;
  j["baseline"] = report.baseline_condition_id;
  j["intersection"] = report.intersection;
  if (report.intersection) j["intersection_size"] = report.intersection_size;
  nlohmann::json rows = nlohmann::json::array();
  for (const ConditionReport& r : report.conditions) {
    nlohmann::json row = {
        {"condition_id", r.condition_id},
        {"model_id", r.model_id},
        {"k", r.k},
        {"temperature", r.temperature},
        {"prompt_variant", r.prompt_variant},
        {"refused", r.refused},
        {"failed", r.failed},
        {"incomplete", r.incomplete},
        {"overall", cell_to_json(r.overall)},
        {"cost",
         {{"input_tokens", r.ledger.total_input_tokens},
          {"output_tokens", r.ledger.total_output_tokens},
          {"dollars", r.ledger.dollars},
          {"baseline_dollars", r.ledger.baseline_dollars},
          {"ratio_to_baseline", r.ledger.ratio_to_baseline}}},
    };
    nlohmann::json cats = nlohmann::json::object();
    for (const auto& [c, cell] : r.by_category) {
      cats[std::string(category_name(c))] = cell_to_json(cell);
    }
    row["by_category"] = std::move(cats);
    if (r.vs_baseline) row["p_gt_baseline"] = r.vs_baseline->p_a_gt_b;
    rows.push_back(std::move(row));
  }
  j["conditions"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// Temperature sweep

std::vector<TemperatureRow> run_temperature_sweep(
    const Dataset& dataset, const ConditionConfig& base_config,
    const std::vector<double>& temperatures, JudgeBackend& backend,
    RecordStore& store, const RunOptions& options,
    const ReportOptions& report_options) {
  if (temperatures.empty()) fail(ErrorCode::kConfig, "no temperatures to sweep");
  std::vector<TemperatureRow> rows;
  for (double t : temperatures) {
    TemperatureRow row;
    row.temperature = t;
    std::vector<int> ks = {1};
    if (base_config.k > 1) ks.push_back(base_config.k);
    for (int k : ks) {
      ConditionConfig c = base_config;
      c.k = k;
      c.temperature = t;
      c.condition_id = fmt::format("{}_t{:.2f}_k{}", base_config.condition_id, t, k);
      run_condition(dataset, c, backend, store, options);
      const ConditionData d = collect_condition(store, c.condition_id,
                                                report_options.pricing);
      AccuracyCell cell = accuracy_cell(d.matrices, report_options);
      if (k == 1) {
        row.k1_condition = c.condition_id;
        row.k1 = cell;
      }
      if (k == base_config.k) {
        row.kmax_condition = c.condition_id;
        row.kmax = cell;
      }
    }
    row.gap = row.kmax.accuracy - row.k1.accuracy;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_temperature_tsv(const std::vector<TemperatureRow>& rows) {
  std::string out =
      "temperature\tk1_condition\tk1_n\tk1_accuracy_pct\tk1_ci_half_width_pp\t"
      "kmax_condition\tkmax_n\tkmax_accuracy_pct\tkmax_ci_half_width_pp\tgap_pp\n";
  for (const TemperatureRow& r : rows) {
    out += fmt::format("{:.2f}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.4f}\n",
                       r.temperature, r.k1_condition, r.k1.n,
                       pct_or_na(r.k1, r.k1.accuracy),
                       pct_or_na(r.k1, r.k1.ci.half_width), r.kmax_condition,
                       r.kmax.n, pct_or_na(r.kmax, r.kmax.accuracy),
                       pct_or_na(r.kmax, r.kmax.ci.half_width), 100.0 * r.gap);
  }
  return out;
}

std::vector<PairedScores> pair_conditions(const RecordStore& store,
                                          const std::string& mini_condition,
                                          const std::string& full_condition,
                                          const PricingTable& pricing) {
  const ConditionData mini = collect_condition(store, mini_condition, pricing);
  const ConditionData full = collect_condition(store, full_condition, pricing);
  std::map<std::string, const JudgedMatrix*> by_id;
  for (const JudgedMatrix& jm : full.matrices) by_id[jm.matrix.example_id()] = &jm;
  std::vector<PairedScores> pairs;
  for (const JudgedMatrix& jm : mini.matrices) {
    auto it = by_id.find(jm.matrix.example_id());
    if (it == by_id.end()) continue;
    PairedScores p;
    p.example_id = jm.matrix.example_id();
    p.category = mini.categories.at(p.example_id);
    p.mini = jm.matrix;
    p.full = it->second->matrix;
    p.chosen_index = jm.chosen_index;
    validate(p);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace judgekit
