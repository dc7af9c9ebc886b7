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

#include "judgekit/judge_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "judgekit/errors.hpp"

namespace judgekit {

void validate(const JudgeRequest& request) {
  if (request.n_completions < 1) {
    fail(ErrorCode::kDomain, "n_completions must be >= 1");
  }
  if (request.max_output_tokens <= 0) {
    fail(ErrorCode::kDomain, "max_output_tokens must be > 0");
  }
  if (request.temperature < 0.0) {
    fail(ErrorCode::kDomain, "temperature must be >= 0");
  }
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt,
                                                   double jitter01) const {
  const double nominal = static_cast<double>(initial_delay.count()) *
                         std::pow(multiplier, std::max(0, attempt - 1));
  const double capped =
      std::min(nominal, static_cast<double>(max_delay.count()));
  const double jittered = capped * (1.0 + jitter_fraction * jitter01);
  return std::chrono::milliseconds(static_cast<std::int64_t>(jittered));
}

// ---------------------------------------------------------------------------
// Simulated judge

void validate(const SimProfile& profile) {
  if (!(profile.refusal_probability >= 0.0 &&
        profile.refusal_probability <= 1.0)) {
    fail(ErrorCode::kValidation, "refusal_probability must be in [0, 1]");
  }
  if (profile.family == ScoreFamily::kDiscretizedGaussianClamped) {
    if (!std::isfinite(profile.mean) || !(profile.std >= 0.0) ||
        !std::isfinite(profile.std)) {
      fail(ErrorCode::kValidation, "gaussian profile needs finite mean, std >= 0");
    }
    return;
  }
  double total = 0.0;
  for (double p : profile.probabilities) {
    if (!(p >= 0.0)) fail(ErrorCode::kValidation, "negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorCode::kValidation, "categorical probabilities must sum to 1");
  }
}

namespace {

int clamp_score(double x) {
  const double r = std::floor(x + 0.5);
  if (r < 1.0) return 1;
  if (r > 10.0) return 10;
  return static_cast<int>(r);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

int sample_score(const SimProfile& profile, Rng& rng, double std_scale) {
  if (profile.family == ScoreFamily::kCategorical) {
    const double u = rng.uniform();
    double acc = 0.0;
    int last_positive = 1;
    for (int v = 1; v <= 10; ++v) {
      const double p = profile.probabilities[v - 1];
      if (p <= 0.0) continue;
      last_positive = v;
      acc += p;
      if (u < acc) return v;
    }
    return last_positive;
  }
  // Always consume the same number of draws so streams stay aligned.
  const double z = rng.normal();
  return clamp_score(profile.mean + profile.std * std_scale * z);
}

double clamped_gaussian_mean(double mean, double std) {
  if (std == 0.0) return clamp_score(mean);
  double expected = 0.0;
  for (int v = 1; v <= 10; ++v) {
    const double lo = v == 1 ? 0.0 : normal_cdf((v - 0.5 - mean) / std);
    const double hi = v == 10 ? 1.0 : normal_cdf((v + 0.5 - mean) / std);
    expected += v * (hi - lo);
  }
  return expected;
}

std::string render_simulated_completion(int score) {
  return "The response was weighed for helpfulness, relevance, and accuracy.\n" +
         std::to_string(score);
}

std::int64_t simulated_input_tokens(std::string_view prompt) {
  return static_cast<std::int64_t>((prompt.size() + 3) / 4);
}

SimulatedBackend::SimulatedBackend(ProfileSet profiles)
    : profiles_(std::move(profiles)) {
  for (const auto& [model, examples] : profiles_.models) {
    for (const auto& [id, four] : examples) {
      for (const SimProfile& p : four) validate(p);
    }
  }
}

JudgeResponse SimulatedBackend::request_scores(const JudgeRequest& request) {
  validate(request);
  auto model = profiles_.models.find(request.model_id);
  if (model == profiles_.models.end()) {
    fail(ErrorCode::kConfig,
         "simulated backend has no profiles for model '" + request.model_id + "'");
  }
  auto example = model->second.find(request.tag.example_id);
  if (example == model->second.end()) {
    fail(ErrorCode::kConfig, "simulated backend has no profile for example '" +
                                 request.tag.example_id + "'");
  }
  const int r = request.tag.response_index;
  if (r < 0 || r >= static_cast<int>(kResponsesPerExample)) {
    fail(ErrorCode::kDomain, "response_index out of range");
  }
  const SimProfile& profile = example->second[r];

  std::uint64_t base = combine_seed(request.tag.seed,
                                    hash_string(request.model_id));
  base = combine_seed(base, hash_string(request.tag.example_id));
  base = combine_seed(base, static_cast<std::uint64_t>(r));

  JudgeResponse response;
  response.input_tokens = simulated_input_tokens(request.prompt);

  Rng refusal_rng(combine_seed(
      combine_seed(base, hash_string("refusal")),
      static_cast<std::uint64_t>(request.tag.first_sample) * 1024 +
          static_cast<std::uint64_t>(request.tag.attempt)));
  if (profile.refusal_probability > 0.0 &&
      refusal_rng.bernoulli(profile.refusal_probability)) {
    response.refused = true;
    return response;
  }

  const double scale =
      profiles_.temperature_scaling.at(request.temperature);
  for (int j = 0; j < request.n_completions; ++j) {
    const auto sample = static_cast<std::uint64_t>(request.tag.first_sample + j);
    Rng rng(combine_seed(combine_seed(base, sample),
                         static_cast<std::uint64_t>(request.tag.attempt)));
    response.completions.push_back(
        render_simulated_completion(sample_score(profile, rng, scale)));
    response.output_tokens_per_completion.push_back(kSimulatedOutputTokens);
  }
  return response;
}

// ---------------------------------------------------------------------------
// Profile files

namespace {

nlohmann::json profile_to_json(const SimProfile& p) {
  nlohmann::json j;
  if (p.family == ScoreFamily::kCategorical) {
    j["family"] = "categorical";
    j["probabilities"] = p.probabilities;
  } else {
    j["family"] = "gaussian";
    j["mean"] = p.mean;
    j["std"] = p.std;
  }
  if (p.refusal_probability != 0.0) {
    j["refusal_probability"] = p.refusal_probability;
  }
  return j;
}

SimProfile profile_from_json(const nlohmann::json& j) {
  SimProfile p;
  const std::string family = j.value("family", "gaussian");
  if (family == "categorical") {
    p.family = ScoreFamily::kCategorical;
    const auto& probs = j.at("probabilities");
    if (!probs.is_array() || probs.size() != 10) {
      fail(ErrorCode::kValidation, "categorical profile needs 10 probabilities");
    }
    for (std::size_t i = 0; i < 10; ++i) p.probabilities[i] = probs[i].get<double>();
  } else if (family == "gaussian") {
    p.mean = j.at("mean").get<double>();
    p.std = j.at("std").get<double>();
  } else {
    fail(ErrorCode::kValidation, "unknown profile family '" + family + "'");
  }
  p.refusal_probability = j.value("refusal_probability", 0.0);
  validate(p);
  return p;
}

}  // namespace

ProfileSet load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open profiles '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kValidation,
         "malformed profile file '" + path.string() + "': " + e.what());
  }
  ProfileSet set;
  try {
    if (auto ts = doc.find("temperature_scaling"); ts != doc.end()) {
      set.temperature_scaling.floor = ts->value("floor", 1.0);
      set.temperature_scaling.slope = ts->value("slope", 0.0);
    }
    for (const auto& [model, examples] : doc.at("models").items()) {
      auto& out = set.models[model];
      for (const auto& [id, four] : examples.items()) {
        if (!four.is_array() || four.size() != kResponsesPerExample) {
          fail(ErrorCode::kValidation,
               "example '" + id + "' needs exactly 4 profiles");
        }
        ResponseProfiles profiles;
        for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
          profiles[i] = profile_from_json(four[i]);
        }
        out.emplace(id, profiles);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kValidation,
         "malformed profile file '" + path.string() + "': " + e.what());
  }
  return set;
}

void save_profiles(const ProfileSet& profiles, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["temperature_scaling"] = {{"floor", profiles.temperature_scaling.floor},
                                {"slope", profiles.temperature_scaling.slope}};
  nlohmann::json models = nlohmann::json::object();
  for (const auto& [model, examples] : profiles.models) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [id, four] : examples) {
      nlohmann::json arr = nlohmann::json::array();
      for (const SimProfile& p : four) arr.push_back(profile_to_json(p));
      m[id] = std::move(arr);
    }
    models[model] = std::move(m);
  }
  doc["models"] = std::move(models);
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << doc.dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// Live provider client

ProviderConfig provider_from_environment(const std::string& model_id) {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v == nullptr ? std::string() : std::string(v);
  };
  ProviderConfig cfg;
  if (model_id.rfind("claude", 0) == 0) {
    cfg.kind = ProviderKind::kAnthropic;
    cfg.api_key = env("ANTHROPIC_API_KEY");
    cfg.base_url = env("ANTHROPIC_BASE_URL");
    if (cfg.base_url.empty()) cfg.base_url = "https://api.anthropic.com";
  } else {
    cfg.kind = ProviderKind::kOpenAI;
    cfg.api_key = env("OPENAI_API_KEY");
    cfg.base_url = env("OPENAI_BASE_URL");
    if (cfg.base_url.empty()) cfg.base_url = "https://api.openai.com";
  }
  if (cfg.api_key.empty()) {
    fail(ErrorCode::kAuth, std::string("missing credentials: set ") +
                               (cfg.kind == ProviderKind::kAnthropic
                                    ? "ANTHROPIC_API_KEY"
                                    : "OPENAI_API_KEY"));
  }
  return cfg;
}

namespace {

bool is_content_filter_error(const std::string& body) {
  try {
    auto doc = nlohmann::json::parse(body);
    auto err = doc.find("error");
    if (err == doc.end() || !err->is_object()) return false;
    const std::string code = err->value("code", std::string());
    return code == "content_filter" || code == "content_policy_violation";
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

}  // namespace

JudgeResponse parse_openai_response(const std::string& body, int n_expected) {
  JudgeResponse out;
  try {
    auto doc = nlohmann::json::parse(body);
    const auto& choices = doc.at("choices");
    const auto& usage = doc.at("usage");
    out.input_tokens = usage.at("prompt_tokens").get<std::int64_t>();
    const auto total_out = usage.at("completion_tokens").get<std::int64_t>();
    for (const auto& choice : choices) {
      if (choice.value("finish_reason", std::string()) == "content_filter") {
        out.refused = true;
      }
      const auto& content = choice.at("message").at("content");
      out.completions.push_back(content.is_string() ? content.get<std::string>()
                                                    : std::string());
    }
    if (out.refused) {
      out.completions.clear();
      return out;
    }
    if (static_cast<int>(out.completions.size()) != n_expected) {
      fail(ErrorCode::kMalformedPayload,
           "expected " + std::to_string(n_expected) + " choices, got " +
               std::to_string(out.completions.size()));
    }
    // The usage block reports one total; spread it across completions.
    const auto n = static_cast<std::int64_t>(out.completions.size());
    for (std::int64_t i = 0; i < n; ++i) {
      out.output_tokens_per_completion.push_back(total_out / n +
                                                 (i < total_out % n ? 1 : 0));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedPayload,
         std::string("unexpected chat-completion payload: ") + e.what());
  }
  return out;
}

JudgeResponse parse_anthropic_response(const std::string& body) {
  JudgeResponse out;
  try {
    auto doc = nlohmann::json::parse(body);
    const auto& usage = doc.at("usage");
    out.input_tokens = usage.at("input_tokens").get<std::int64_t>();
    if (doc.value("stop_reason", std::string()) == "refusal") {
      out.refused = true;
      return out;
    }
    std::string text;
    for (const auto& block : doc.at("content")) {
      if (block.value("type", std::string()) == "text") {
        text += block.at("text").get<std::string>();
      }
    }
    out.completions.push_back(std::move(text));
    out.output_tokens_per_completion.push_back(
        usage.at("output_tokens").get<std::int64_t>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedPayload,
         std::string("unexpected messages payload: ") + e.what());
  }
  return out;
}

LiveBackend::LiveBackend(std::shared_ptr<HttpTransport> transport,
                         RetryPolicy policy, Sleeper sleeper,
                         ProviderResolver resolver)
    : transport_(std::move(transport)),
      policy_(policy),
      sleeper_(std::move(sleeper)),
      resolver_(std::move(resolver)) {}

JudgeResponse LiveBackend::send_with_retries(
    const ProviderConfig& provider, const std::string& path,
    const std::multimap<std::string, std::string>& headers,
    const std::string& body, int n_expected) {
  Rng jitter(hash_string(body));
  std::string last_problem;
  ErrorCode last_code = ErrorCode::kTransport;
  for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    HttpResult result = transport_->post(provider.base_url, path, headers, body);
    if (result.status == 200) {
      return provider.kind == ProviderKind::kAnthropic
                 ? parse_anthropic_response(result.body)
                 : parse_openai_response(result.body, n_expected);
    }
    if (result.status == 401 || result.status == 403) {
      fail(ErrorCode::kAuth, "provider rejected credentials (HTTP " +
                                 std::to_string(result.status) + ")");
    }
    if (result.status == 400 && is_content_filter_error(result.body)) {
      JudgeResponse refused;
      refused.refused = true;
      return refused;
    }
    const bool transient = result.status == 0 || result.status == 408 ||
                           result.status == 429 || result.status >= 500;
    if (!transient) {
      fail(ErrorCode::kMalformedPayload,
           "provider returned HTTP " + std::to_string(result.status) + ": " +
               result.body.substr(0, 200));
    }
    last_code = result.status == 429 ? ErrorCode::kRateLimited
                                     : ErrorCode::kTransport;
    last_problem = result.status == 0 ? result.error
                                      : "HTTP " + std::to_string(result.status);
    if (attempt < policy_.max_attempts) {
      sleeper_(policy_.delay_after(attempt, jitter.uniform()));
    }
  }
  fail(last_code, "giving up after " + std::to_string(policy_.max_attempts) +
                      " attempts: " + last_problem);
}

JudgeResponse LiveBackend::request_scores(const JudgeRequest& request) {
  validate(request);
  const ProviderConfig provider = resolver_(request.model_id);

  if (provider.kind == ProviderKind::kOpenAI) {
    nlohmann::json body = {
        {"model", request.model_id},
        {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
        {"n", request.n_completions},
        {"temperature", request.temperature},
        {"max_completion_tokens", request.max_output_tokens},
    };
    if (!request.reasoning_effort.empty()) {
      body["reasoning_effort"] = request.reasoning_effort;
    }
    std::multimap<std::string, std::string> headers = {
        {"Authorization", "Bearer " + provider.api_key}};
    return send_with_retries(provider, "/v1/chat/completions", headers,
                             body.dump(), request.n_completions);
  }

  // The messages API has no multi-completion parameter: issue n calls and
  // report the provider's usage for each one.
  nlohmann::json body = {
      {"model", request.model_id},
      {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
      {"temperature", std::min(request.temperature, 1.0)},
      {"max_tokens", request.max_output_tokens},
  };
  std::multimap<std::string, std::string> headers = {
      {"x-api-key", provider.api_key}, {"anthropic-version", "2023-06-01"}};
  JudgeResponse merged;
  const std::string payload = body.dump();
  for (int i = 0; i < request.n_completions; ++i) {
    JudgeResponse one =
        send_with_retries(provider, "/v1/messages", headers, payload, 1);
    merged.input_tokens += one.input_tokens;
    if (one.refused) {
      merged.refused = true;
      merged.completions.clear();
      merged.output_tokens_per_completion.clear();
      return merged;
    }
    merged.completions.push_back(std::move(one.completions.front()));
    merged.output_tokens_per_completion.push_back(
        one.output_tokens_per_completion.front());
  }
  return merged;
}

}  // namespace judgekit
