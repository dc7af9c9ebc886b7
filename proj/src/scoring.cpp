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

#include "judgekit/scoring.hpp"

#include <cmath>

#include "judgekit/errors.hpp"

namespace judgekit {

ParsedScore parse_score(std::string_view completion) {
  std::size_t end = completion.size();
  while (end > 0 && !(completion[end - 1] >= '0' && completion[end - 1] <= '9')) {
    --end;
  }
  if (end == 0) return {ParseStatus::kNoScore, 0};
  std::size_t begin = end;
  while (begin > 0 && completion[begin - 1] >= '0' && completion[begin - 1] <= '9') {
    --begin;
  }
  // Skip leading zeros, then bail out on anything too long to be in range.
  while (begin + 1 < end && completion[begin] == '0') ++begin;
  if (end - begin > 2) return {ParseStatus::kOutOfRange, 0};
  int value = 0;
  for (std::size_t i = begin; i < end; ++i) value = value * 10 + (completion[i] - '0');
  if (value < 1 || value > 10) return {ParseStatus::kOutOfRange, value};
  return {ParseStatus::kOk, value};
}

RowOutcome score_row(JudgeBackend& backend, const JudgeRequest& request,
                     const RetryPolicy& policy, const Sleeper& sleeper) {
  validate(request);
  RowOutcome row;
  const int k = request.n_completions;

  JudgeResponse first = backend.request_scores(request);
  if (first.refused) {
    row.status = RowStatus::kRefused;
    row.lost_input_tokens = first.input_tokens;
    for (auto t : first.output_tokens_per_completion) row.lost_output_tokens += t;
    row.message = "refused by provider";
    return row;
  }
  if (static_cast<int>(first.completions.size()) != k ||
      first.output_tokens_per_completion.size() != first.completions.size()) {
    fail(ErrorCode::kMalformedPayload,
         "backend returned " + std::to_string(first.completions.size()) +
             " completions for n=" + std::to_string(k));
  }

  row.samples.resize(k);
  row.samples[0].input_tokens = first.input_tokens;
  std::vector<bool> pending(k, false);
  for (int j = 0; j < k; ++j) {
    row.samples[j].output_tokens = first.output_tokens_per_completion[j];
    ParsedScore parsed = parse_score(first.completions[j]);
    if (parsed.ok()) {
      row.samples[j].score = parsed.score;
    } else {
      pending[j] = true;
    }
  }

  for (int j = 0; j < k; ++j) {
    if (!pending[j]) continue;
    SampleOutcome& slot = row.samples[j];
    while (true) {
      if (slot.attempts >= policy.max_attempts) {
        row.status = RowStatus::kFailed;
        row.failed_slot = j;
        row.message = "no parseable score after " +
                      std::to_string(slot.attempts) + " attempts";
        return row;
      }
      sleeper(policy.delay_after(slot.attempts));
      JudgeRequest retry = request;
      retry.n_completions = 1;
      retry.tag.first_sample = request.tag.first_sample + j;
      retry.tag.attempt = slot.attempts;
      ++slot.attempts;
      JudgeResponse again = backend.request_scores(retry);
      slot.input_tokens += again.input_tokens;
      for (auto t : again.output_tokens_per_completion) slot.output_tokens += t;
      if (again.refused) {
        row.status = RowStatus::kRefused;
        row.message = "refused by provider on retry";
        return row;
      }
      if (again.completions.size() != 1) {
        fail(ErrorCode::kMalformedPayload, "retry returned no completion");
      }
      ParsedScore parsed = parse_score(again.completions.front());
      if (parsed.ok()) {
        slot.score = parsed.score;
        break;
      }
    }
  }
  return row;
}

std::vector<int> score_with_retries(JudgeBackend& backend,
                                    const JudgeRequest& request,
                                    const RetryPolicy& policy,
                                    const Sleeper& sleeper) {
  RowOutcome row = score_row(backend, request, policy, sleeper);
  const std::string where = "example '" + request.tag.example_id +
                            "' response " +
                            std::to_string(request.tag.response_index);
  if (row.status == RowStatus::kRefused) {
    fail(ErrorCode::kRefused, where + ": " + row.message);
  }
  if (row.status == RowStatus::kFailed) {
    fail(ErrorCode::kScoringFailed, where + ": " + row.message);
  }
  std::vector<int> scores;
  scores.reserve(row.samples.size());
  for (const SampleOutcome& s : row.samples) scores.push_back(s.score);
  return scores;
}

ScoreMatrix assemble_matrix(std::string example_id,
                            std::array<std::vector<int>, kResponsesPerExample> rows) {
  const std::size_t k = rows[0].size();
  if (k == 0) fail(ErrorCode::kShape, "score rows must be non-empty");
  for (const auto& row : rows) {
    if (row.size() != k) {
      fail(ErrorCode::kShape, "ragged score matrix for '" + example_id + "'");
    }
    for (int s : row) {
      if (s < 1 || s > 10) {
        fail(ErrorCode::kDomain, "score " + std::to_string(s) +
                                     " outside [1, 10] for '" + example_id + "'");
      }
    }
  }
  ScoreMatrix m;
  m.example_id_ = std::move(example_id);
  m.k_ = static_cast<int>(k);
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    std::int64_t sum = 0;
    for (int s : rows[i]) sum += s;
    const double mean = static_cast<double>(sum) / static_cast<double>(k);
    double ss = 0.0;
    for (int s : rows[i]) ss += (s - mean) * (s - mean);
    m.sums_[i] = sum;
    m.means_[i] = mean;
    m.stds_[i] = std::sqrt(ss / static_cast<double>(k));
  }
  m.scores_ = std::move(rows);
  return m;
}

ScoreMatrix ScoreMatrix::prefix(int j) const {
  if (j < 1 || j > k_) {
    fail(ErrorCode::kDomain, "prefix length " + std::to_string(j) +
                                 " outside [1, " + std::to_string(k_) + "]");
  }
  std::array<std::vector<int>, kResponsesPerExample> rows;
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    rows[i].assign(scores_[i].begin(), scores_[i].begin() + j);
  }
  return assemble_matrix(example_id_, std::move(rows));
}

}  // namespace judgekit
