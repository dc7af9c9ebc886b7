#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "judgekit/dataset.hpp"
#include "judgekit/judge_backend.hpp"

namespace judgekit {

struct ScenarioSpec {
  std::size_t n_examples = 100;
  // Relative weights; missing categories get none. Empty means uniform.
  std::map<Category, double> category_mix;
  double delta_mu = 1.0;  // chosen response's mean advantage
  double sigma = 1.5;     // baseline score std
  double capability_gap = 1.0;  // full model's delta_mu multiplier
  double std_correlation = 0.0;  // target corr of paired mini/full stds
  double std_spread = 0.25;      // relative spread of per-response stds
  double refusal_probability = 0.0;
  TemperatureScaling temperature_scaling;
  std::string mini_model = "gpt-5.4-mini";
  std::string full_model = "gpt-5.4";
  std::uint64_t seed = 0;
};

// Throws Error(kConfig) for n_examples < 1, negative sigma or weights, and
// Error(kDomain) for |std_correlation| > 1.
void validate(const ScenarioSpec& spec);

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct Scenario {
  Dataset dataset;
  ProfileSet profiles;  // entries for spec.mini_model and spec.full_model
};

// Response 0 is the chosen one, with mean 5 + delta_mu (full: 5 + delta_mu *
// capability_gap); the other three sit at 5. Deterministic per seed.
Scenario generate_scenario(const ScenarioSpec& spec);

}  // namespace judgekit
