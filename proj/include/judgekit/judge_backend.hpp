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
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "judgekit/dataset.hpp"
#include "judgekit/rng.hpp"

namespace judgekit {

// Identifies what a request is scoring. The live client ignores it; the
// simulated judge uses it to look up profiles and derive random streams.
struct RequestTag {
  std::string example_id;
  int response_index = 0;
  // Index of the first sample this request produces within its row.
  int first_sample = 0;
  // Distinguishes re-requests of the same sample slot.
  int attempt = 0;
  std::uint64_t seed = 0;
};

struct JudgeRequest {
  std::string prompt;
  int n_completions = 1;
  double temperature = 1.0;
  int max_output_tokens = 4096;
  std::string reasoning_effort = "none";
  std::string model_id;
  RequestTag tag;
};

// Throws Error(kDomain) on n_completions < 1 or max_output_tokens <= 0.
void validate(const JudgeRequest& request);

struct JudgeResponse {
  std::vector<std::string> completions;
  std::int64_t input_tokens = 0;  // charged once per request
  std::vector<std::int64_t> output_tokens_per_completion;
  bool refused = false;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  // Must be safe to call concurrently.
  virtual JudgeResponse request_scores(const JudgeRequest& request) = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30000};
  // Uniform jitter added on top, as a fraction of the nominal delay.
  double jitter_fraction = 0.25;

  // Delay before attempt `attempt + 1`, where `attempt` is 1-based. The
  // jitter draw is supplied by the caller so tests stay deterministic.
  std::chrono::milliseconds delay_after(int attempt, double jitter01 = 0.0) const;
};

// ---------------------------------------------------------------------------
// Simulated judge

enum class ScoreFamily { kDiscretizedGaussianClamped, kCategorical };

struct SimProfile {
  ScoreFamily family = ScoreFamily::kDiscretizedGaussianClamped;
  double mean = 5.0;
  double std = 1.0;
  std::array<double, 10> probabilities{};  // kCategorical: p(1)..p(10)
  double refusal_probability = 0.0;

  friend bool operator==(const SimProfile&, const SimProfile&) = default;
};

void validate(const SimProfile& profile);

// Draws one score in [1, 10]. `std_scale` multiplies the Gaussian std (the
// temperature model); it has no effect on the categorical family.
int sample_score(const SimProfile& profile, Rng& rng, double std_scale = 1.0);

// E[score] for the discretized clamped Gaussian, by summation over 1..10.
double clamped_gaussian_mean(double mean, double std);

// Effective std multiplier at temperature T: floor + slope * T.
struct TemperatureScaling {
  double floor = 1.0;
  double slope = 0.0;
  double at(double temperature) const { return floor + slope * temperature; }
  friend bool operator==(const TemperatureScaling&,
                         const TemperatureScaling&) = default;
};

using ResponseProfiles = std::array<SimProfile, kResponsesPerExample>;

struct ProfileSet {
  TemperatureScaling temperature_scaling;
  // model_id -> example_id -> four profiles
  std::map<std::string, std::map<std::string, ResponseProfiles>> models;

  friend bool operator==(const ProfileSet&, const ProfileSet&) = default;
};

ProfileSet load_profiles(const std::filesystem::path& path);
void save_profiles(const ProfileSet& profiles, const std::filesystem::path& path);

// Completion text the simulated judge emits for a score.
std::string render_simulated_completion(int score);

// Token proxies used by the simulated judge.
std::int64_t simulated_input_tokens(std::string_view prompt);
inline constexpr std::int64_t kSimulatedOutputTokens = 20;

class SimulatedBackend final : public JudgeBackend {
 public:
  explicit SimulatedBackend(ProfileSet profiles);
  JudgeResponse request_scores(const JudgeRequest& request) override;
  const ProfileSet& profiles() const { return profiles_; }

 private:
  ProfileSet profiles_;
};

// ---------------------------------------------------------------------------
// Live provider client

struct HttpResult {
  int status = 0;  // 0 means the request never produced a response
  std::string body;
  std::string error;  // transport-level failure description
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post(const std::string& base_url, const std::string& path,
                          const std::multimap<std::string, std::string>& headers,
                          const std::string& body) = 0;
};

// cpp-httplib backed transport (HTTPS when built with OpenSSL).
std::unique_ptr<HttpTransport> make_http_transport(
    std::chrono::seconds timeout = std::chrono::seconds(120));

enum class ProviderKind { kOpenAI, kAnthropic };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kOpenAI;
  std::string base_url;
  std::string api_key;
};

// Reads OPENAI_API_KEY / OPENAI_BASE_URL or ANTHROPIC_API_KEY /
// ANTHROPIC_BASE_URL. Model ids starting with "claude" map to Anthropic.
ProviderConfig provider_from_environment(const std::string& model_id);

// Parses provider payloads into a JudgeResponse. Exposed for tests.
JudgeResponse parse_openai_response(const std::string& body, int n_expected);
JudgeResponse parse_anthropic_response(const std::string& body);

class LiveBackend final : public JudgeBackend {
 public:
  using ProviderResolver = std::function<ProviderConfig(const std::string&)>;

  LiveBackend(std::shared_ptr<HttpTransport> transport, RetryPolicy policy = {},
              Sleeper sleeper = real_sleeper(),
              ProviderResolver resolver = provider_from_environment);

  JudgeResponse request_scores(const JudgeRequest& request) override;

 private:
  JudgeResponse send_with_retries(const ProviderConfig& provider,
                                  const std::string& path,
                                  const std::multimap<std::string, std::string>&
                                      headers,
                                  const std::string& body, int n_expected);

  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  ProviderResolver resolver_;
};

}  // namespace judgekit
