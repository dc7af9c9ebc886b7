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

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <mutex>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "judgekit/errors.hpp"
#include "judgekit/judge_backend.hpp"
#include "judgekit/scoring.hpp"

using namespace judgekit;

namespace {

ProfileSet one_profile(SimProfile p) {
  ProfileSet set;
  set.models["m"]["x"] = {p, p, p, p};
  return set;
}

JudgeRequest request(int n, int first = 0, std::uint64_t seed = 3) {
  JudgeRequest r;
  r.prompt = std::string(41, 'a');
  r.n_completions = n;
  r.model_id = "m";
  r.tag.example_id = "x";
  r.tag.first_sample = first;
  r.tag.seed = seed;
  return r;
}

std::vector<int> scores_of(const JudgeResponse& r) {
  std::vector<int> out;
  for (const auto& c : r.completions) out.push_back(parse_score(c).score);
  return out;
}

class ScriptedTransport : public HttpTransport {
 public:
  std::deque<HttpResult> replies;
  std::vector<std::string> bodies;
  std::vector<std::string> paths;
  HttpResult post(const std::string&, const std::string& path,
                  const std::multimap<std::string, std::string>&,
                  const std::string& body) override {
    bodies.push_back(body);
    paths.push_back(path);
    if (replies.empty()) return {500, "", ""};
    HttpResult r = replies.front();
    replies.pop_front();
    return r;
  }
};

std::string openai_body(const std::vector<std::string>& texts, int in, int out,
                        const std::string& finish = "stop") {
  nlohmann::json choices = nlohmann::json::array();
  for (const auto& t : texts) {
    choices.push_back({{"message", {{"role", "assistant"}, {"content", t}}},
                       {"finish_reason", finish}});
  }
  return nlohmann::json{{"choices", choices},
                        {"usage", {{"prompt_tokens", in}, {"completion_tokens", out}}}}
      .dump();
}

ProviderConfig openai(const std::string&) { return {ProviderKind::kOpenAI, "http://x", "k"}; }
ProviderConfig anthropic(const std::string&) {
  return {ProviderKind::kAnthropic, "http://y", "k"};
}

}  // namespace

TEST(SimulatedJudge, DeterministicAndTokenAccounting) {
  SimulatedBackend a(one_profile({ScoreFamily::kDiscretizedGaussianClamped, 5.5, 2.0}));
  SimulatedBackend b(one_profile({ScoreFamily::kDiscretizedGaussianClamped, 5.5, 2.0}));
  const JudgeResponse ra = a.request_scores(request(8));
  EXPECT_EQ(scores_of(ra), scores_of(b.request_scores(request(8))));
  EXPECT_EQ(ra.input_tokens, 11);  // ceil(41 / 4)
  ASSERT_EQ(ra.output_tokens_per_completion.size(), 8u);
  for (auto t : ra.output_tokens_per_completion) EXPECT_EQ(t, kSimulatedOutputTokens);
  EXPECT_TRUE(ra.completions[0].starts_with("The response was weighed"));
}

TEST(SimulatedJudge, CommonRandomNumbersAcrossK) {
  SimulatedBackend sim(one_profile({ScoreFamily::kDiscretizedGaussianClamped, 5.0, 2.5}));
  const auto eight = scores_of(sim.request_scores(request(8)));
  const auto one = scores_of(sim.request_scores(request(1)));
  EXPECT_EQ(one[0], eight[0]);
  // Splitting a row across requests yields the same samples.
  const auto tail = scores_of(sim.request_scores(request(5, 3)));
  for (int j = 0; j < 5; ++j) EXPECT_EQ(tail[j], eight[3 + j]);
  EXPECT_NE(eight, scores_of(sim.request_scores(request(8, 0, 4))));
}

TEST(SimulatedJudge, ZeroStdIsDeterministicScore) {
  SimulatedBackend sim(one_profile({ScoreFamily::kDiscretizedGaussianClamped, 6.5, 0.0}));
  for (int s : scores_of(sim.request_scores(request(8)))) EXPECT_EQ(s, 7);
  SimulatedBackend low(one_profile({ScoreFamily::kDiscretizedGaussianClamped, -3.0, 0.0}));
  for (int s : scores_of(low.request_scores(request(4)))) EXPECT_EQ(s, 1);
}

TEST(SimulatedJudge, ClampedGaussianMeanMatchesMonteCarlo) {
  for (auto [mu, sd] : {std::pair{5.0, 1.5}, {9.0, 2.0}, {1.5, 3.0}, {7.3, 0.4}}) {
    SimProfile p{ScoreFamily::kDiscretizedGaussianClamped, mu, sd};
    Rng rng(17);
    const int n = 200000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += sample_score(p, rng);
    EXPECT_NEAR(sum / n, clamped_gaussian_mean(mu, sd), 0.02) << mu << " " << sd;
  }
}

TEST(SimulatedJudge, CategoricalFrequencies) {
  SimProfile p;
  p.family = ScoreFamily::kCategorical;
  p.probabilities = {0, 0, 0.2, 0, 0, 0.5, 0, 0, 0.3, 0};
  Rng rng(3);
  std::array<int, 11> hits{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits[sample_score(p, rng)]++;
  EXPECT_NEAR(hits[3] / double(n), 0.2, 0.01);
  EXPECT_NEAR(hits[6] / double(n), 0.5, 0.01);
  EXPECT_NEAR(hits[9] / double(n), 0.3, 0.01);
  EXPECT_EQ(hits[1] + hits[10], 0);
}

TEST(SimulatedJudge, TemperatureScalesSpread) {
  ProfileSet set = one_profile({ScoreFamily::kDiscretizedGaussianClamped, 5.0, 1.0});
  set.temperature_scaling = {0.0, 1.0};
  SimulatedBackend sim(set);
  JudgeRequest r = request(64);
  r.temperature = 0.0;
  for (int s : scores_of(sim.request_scores(r))) EXPECT_EQ(s, 5);
  r.temperature = 2.0;
  const auto hot = scores_of(sim.request_scores(r));
  EXPECT_GT(*std::max_element(hot.begin(), hot.end()) -
                *std::min_element(hot.begin(), hot.end()),
            2);
}

TEST(SimulatedJudge, RefusalsAndUnknownIds) {
  SimProfile p{ScoreFamily::kDiscretizedGaussianClamped, 5.0, 1.0};
  p.refusal_probability = 1.0;
  SimulatedBackend sim(one_profile(p));
  const JudgeResponse r = sim.request_scores(request(4));
  EXPECT_TRUE(r.refused);
  EXPECT_TRUE(r.completions.empty());
  JudgeRequest bad = request(1);
  bad.tag.example_id = "missing";
  EXPECT_THROW(sim.request_scores(bad), Error);
  bad = request(1);
  bad.model_id = "other";
  EXPECT_THROW(sim.request_scores(bad), Error);
  EXPECT_THROW(sim.request_scores(request(0)), Error);
}

TEST(SimulatedJudge, ProfileFileRoundTrip) {
  ProfileSet set;
  set.temperature_scaling = {0.25, 0.5};
  SimProfile g{ScoreFamily::kDiscretizedGaussianClamped, 6.25, 1.75};
  SimProfile c;
  c.family = ScoreFamily::kCategorical;
  c.probabilities = {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  c.refusal_probability = 0.05;
  set.models["a"]["e1"] = {g, c, g, c};
  set.models["b"]["e2"] = {c, c, g, g};
  const auto path = std::filesystem::temp_directory_path() / "judgekit_profiles.json";
  save_profiles(set, path);
  EXPECT_EQ(load_profiles(path), set);
  std::filesystem::remove(path);
}

TEST(RetryPolicy, BackoffSchedule) {
  RetryPolicy p;
  EXPECT_EQ(p.delay_after(1).count(), 1000);
  EXPECT_EQ(p.delay_after(2).count(), 2000);
  EXPECT_EQ(p.delay_after(3).count(), 4000);
  EXPECT_EQ(p.delay_after(10).count(), 30000);
  EXPECT_EQ(p.delay_after(1, 1.0).count(), 1250);
}

TEST(LiveClient, OpenAIParsesAndSplitsUsage) {
  auto t = std::make_shared<ScriptedTransport>();
  t->replies.push_back({200, openai_body({"fine\n7", "ok 8", "9"}, 120, 61), ""});
  LiveBackend live(t, {}, [](auto) {}, openai);
  const JudgeResponse r = live.request_scores(request(3));
  EXPECT_EQ(r.input_tokens, 120);
  EXPECT_EQ(r.output_tokens_per_completion, (std::vector<std::int64_t>{21, 20, 20}));
  EXPECT_EQ(scores_of(r), (std::vector<int>{7, 8, 9}));
  const auto body = nlohmann::json::parse(t->bodies.at(0));
  EXPECT_EQ(body["n"], 3);
  EXPECT_EQ(body["reasoning_effort"], "none");
  EXPECT_EQ(body["max_completion_tokens"], 4096);
  EXPECT_EQ(t->paths.at(0), "/v1/chat/completions");
}

TEST(LiveClient, ContentFilterIsRefusal) {
  auto t = std::make_shared<ScriptedTransport>();
  t->replies.push_back({200, openai_body({""}, 50, 0, "content_filter"), ""});
  t->replies.push_back({400, R"({"error":{"code":"content_filter","message":"no"}})", ""});
  LiveBackend live(t, {}, [](auto) {}, openai);
  EXPECT_TRUE(live.request_scores(request(1)).refused);
  EXPECT_TRUE(live.request_scores(request(1)).refused);
}

TEST(LiveClient, ErrorClassification) {
  int sleeps = 0;
  auto sleeper = [&](std::chrono::milliseconds) { ++sleeps; };
  auto expect_code = [&](std::vector<HttpResult> replies, ErrorCode code, int calls) {
    auto t = std::make_shared<ScriptedTransport>();
    for (auto& r : replies) t->replies.push_back(r);
    LiveBackend live(t, {}, sleeper, openai);
    try {
      live.request_scores(request(1));
      ADD_FAILURE() << "expected " << error_code_name(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
    EXPECT_EQ(static_cast<int>(t->bodies.size()), calls);
  };
  expect_code({{401, "", ""}}, ErrorCode::kAuth, 1);
  expect_code({{403, "", ""}}, ErrorCode::kAuth, 1);
  sleeps = 0;
  expect_code({{429, "", ""}, {429, "", ""}, {429, "", ""}}, ErrorCode::kRateLimited, 3);
  EXPECT_EQ(sleeps, 2);
  expect_code({{0, "", "connect failed"}, {503, "", ""}, {500, "", ""}},
              ErrorCode::kTransport, 3);
  expect_code({{404, "nope", ""}}, ErrorCode::kMalformedPayload, 1);
  expect_code({{200, "{}", ""}}, ErrorCode::kMalformedPayload, 1);
  expect_code({{200, openai_body({"1", "2"}, 1, 1), ""}}, ErrorCode::kMalformedPayload, 1);
}

TEST(LiveClient, TransientThenSuccess) {
  auto t = std::make_shared<ScriptedTransport>();
  t->replies.push_back({429, "", ""});
  t->replies.push_back({200, openai_body({"10"}, 5, 3), ""});
  std::vector<std::chrono::milliseconds> delays;
  LiveBackend live(t, {}, [&](auto d) { delays.push_back(d); }, openai);
  EXPECT_EQ(scores_of(live.request_scores(request(1))), std::vector<int>{10});
  ASSERT_EQ(delays.size(), 1u);
  EXPECT_GE(delays[0].count(), 1000);
  EXPECT_LE(delays[0].count(), 1250);
}

TEST(LiveClient, AnthropicIssuesOneCallPerCompletion) {
  auto t = std::make_shared<ScriptedTransport>();
  for (int i = 0; i < 3; ++i) {
    t->replies.push_back(
        {200,
         nlohmann::json{{"content", {{{"type", "text"}, {"text", "score " + std::to_string(4 + i)}}}},
                        {"stop_reason", "end_turn"},
                        {"usage", {{"input_tokens", 100}, {"output_tokens", 10 + i}}}}
             .dump(),
         ""});
  }
  LiveBackend live(t, {}, [](auto) {}, anthropic);
  const JudgeResponse r = live.request_scores(request(3));
  EXPECT_EQ(t->bodies.size(), 3u);
  EXPECT_EQ(t->paths.at(0), "/v1/messages");
  EXPECT_EQ(r.input_tokens, 300);
  EXPECT_EQ(scores_of(r), (std::vector<int>{4, 5, 6}));
  EXPECT_EQ(r.output_tokens_per_completion, (std::vector<std::int64_t>{10, 11, 12}));

  t->replies.push_back(
      {200, R"({"content":[],"stop_reason":"refusal","usage":{"input_tokens":9,"output_tokens":0}})", ""});
  EXPECT_TRUE(live.request_scores(request(2)).refused);
}

TEST(LiveClient, EnvironmentResolution) {
  ::setenv("ANTHROPIC_API_KEY", "secret", 1);
  ::unsetenv("ANTHROPIC_BASE_URL");
  const ProviderConfig a = provider_from_environment("claude-haiku-4.5");
  EXPECT_EQ(a.kind, ProviderKind::kAnthropic);
  EXPECT_EQ(a.api_key, "secret");
  EXPECT_EQ(a.base_url, "https://api.anthropic.com");
  ::unsetenv("OPENAI_API_KEY");
  try {
    provider_from_environment("gpt-5.4");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuth);
  }
}
