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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "judgekit/dataset.hpp"
#include "judgekit/judge_backend.hpp"

namespace judgekit {

enum class ParseStatus { kOk, kNoScore, kOutOfRange };

struct ParsedScore {
  ParseStatus status = ParseStatus::kNoScore;
  int score = 0;
  bool ok() const { return status == ParseStatus::kOk; }
  // Both failure kinds are retryable.
  bool retryable() const { return !ok(); }
};

// Takes the final maximal run of ASCII digits. Any preceding '-' is ignored.
// Total over arbitrary bytes; never throws.
ParsedScore parse_score(std::string_view completion);

// One scored sample slot, with every token spent producing it (including
// discarded unparseable completions and retry calls).
struct SampleOutcome {
  int score = 0;
  int attempts = 1;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
};

enum class RowStatus { kOk, kRefused, kFailed };

struct RowOutcome {
  RowStatus status = RowStatus::kOk;
  std::vector<SampleOutcome> samples;  // size k when kOk
  // Tokens billed when the row did not complete.
  std::int64_t lost_input_tokens = 0;
  std::int64_t lost_output_tokens = 0;
  int failed_slot = -1;
  std::string message;
};

// Issues request.n_completions completions in one call, then re-requests
// unparseable slots one completion at a time, up to policy.max_attempts total
// attempts per slot, sleeping per the backoff schedule between attempts.
RowOutcome score_row(JudgeBackend& backend, const JudgeRequest& request,
                     const RetryPolicy& policy, const Sleeper& sleeper);

// Convenience wrapper: returns the k scores or throws Error(kScoringFailed)
// / Error(kRefused).
std::vector<int> score_with_retries(JudgeBackend& backend,
                                    const JudgeRequest& request,
                                    const RetryPolicy& policy,
                                    const Sleeper& sleeper);

// 4 x k integer scores for one example under one condition.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  const std::string& example_id() const { return example_id_; }
  int k() const { return k_; }
  const std::array<std::vector<int>, kResponsesPerExample>& scores() const {
    return scores_;
  }
  const std::vector<int>& row(std::size_t i) const { return scores_[i]; }
  const std::array<std::int64_t, kResponsesPerExample>& sums() const {
    return sums_;
  }
  const std::array<double, kResponsesPerExample>& means() const { return means_; }
  // Population standard deviation of each row.
  const std::array<double, kResponsesPerExample>& stds() const { return stds_; }

  // Matrix over the first j samples of every row; 1 <= j <= k.
  ScoreMatrix prefix(int j) const;

  friend ScoreMatrix assemble_matrix(
      std::string example_id,
      std::array<std::vector<int>, kResponsesPerExample> rows);

 private:
  std::string example_id_;
  int k_ = 0;
  std::array<std::vector<int>, kResponsesPerExample> scores_;
  std::array<std::int64_t, kResponsesPerExample> sums_{};
  std::array<double, kResponsesPerExample> means_{};
  std::array<double, kResponsesPerExample> stds_{};
};

// Throws Error(kShape) for ragged or empty rows, Error(kDomain) for scores
// outside [1, 10].
ScoreMatrix assemble_matrix(std::string example_id,
                            std::array<std::vector<int>, kResponsesPerExample> rows);

}  // namespace judgekit
