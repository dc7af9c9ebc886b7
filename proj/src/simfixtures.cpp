#include "judgekit/simfixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "judgekit/errors.hpp"
#include "judgekit/rng.hpp"

namespace judgekit {

namespace {

constexpr double kBaseMean = 5.0;

std::map<Category, double> effective_mix(const ScenarioSpec& spec) {
  if (!spec.category_mix.empty()) return spec.category_mix;
  std::map<Category, double> mix;
  for (Category c : kAllCategories) mix[c] = 1.0;
  return mix;
}

// Largest-remainder apportionment of n over the mix weights.
std::vector<Category> category_sequence(const ScenarioSpec& spec) {
  const auto mix = effective_mix(spec);
  const double total = std::accumulate(
      mix.begin(), mix.end(), 0.0, [](double s, const auto& kv) { return s + kv.second; });
  std::vector<std::pair<Category, std::size_t>> counts;
  std::vector<std::pair<double, Category>> remainders;
  std::size_t assigned = 0;
  for (const auto& [c, w] : mix) {
    const double exact = static_cast<double>(spec.n_examples) * w / total;
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    counts.emplace_back(c, whole);
    remainders.emplace_back(exact - static_cast<double>(whole), c);
    assigned += whole;
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < spec.n_examples; ++i, ++assigned) {
    const Category c = remainders[i % remainders.size()].second;
    for (auto& [cc, n] : counts) {
      if (cc == c) ++n;
    }
  }
  std::vector<Category> seq;
  for (const auto& [c, n] : counts) seq.insert(seq.end(), n, c);
  return seq;
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.n_examples < 1) fail(ErrorCode::kConfig, "n_examples must be >= 1");
  if (!(spec.sigma >= 0.0)) fail(ErrorCode::kConfig, "sigma must be >= 0");
  if (!(spec.std_spread >= 0.0)) fail(ErrorCode::kConfig, "std_spread must be >= 0");
  if (!std::isfinite(spec.delta_mu) || !std::isfinite(spec.capability_gap)) {
    fail(ErrorCode::kConfig, "delta_mu and capability_gap must be finite");
  }
  if (!(std::abs(spec.std_correlation) <= 1.0)) {
    fail(ErrorCode::kDomain, fmt::format("std correlation target {} is not achievable",
                                         spec.std_correlation));
  }
  if (spec.refusal_probability < 0.0 || spec.refusal_probability > 1.0) {
    fail(ErrorCode::kConfig, "refusal_probability must lie in [0, 1]");
  }
  double total = 0.0;
  for (const auto& [c, w] : spec.category_mix) {
    if (!(w >= 0.0)) fail(ErrorCode::kConfig, "category weights must be >= 0");
    total += w;
  }
  if (!spec.category_mix.empty() && total <= 0.0) {
    fail(ErrorCode::kConfig, "category weights sum to zero");
  }
  if (spec.mini_model.empty() || spec.full_model.empty() ||
      spec.mini_model == spec.full_model) {
    fail(ErrorCode::kConfig, "mini_model and full_model must be distinct ids");
  }
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  try {
    s.n_examples = j.value("n_examples", s.n_examples);
    if (j.contains("category_mix")) {
      for (const auto& [name, w] : j.at("category_mix").items()) {
        const auto c = parse_category(name);
        if (!c) fail(ErrorCode::kConfig, "unknown category '" + name + "'");
        s.category_mix[*c] = w.get<double>();
      }
    }
    s.delta_mu = j.value("delta_mu", s.delta_mu);
    s.sigma = j.value("sigma", s.sigma);
    s.capability_gap = j.value("capability_gap", s.capability_gap);
    s.std_correlation = j.value("std_correlation", s.std_correlation);
    s.std_spread = j.value("std_spread", s.std_spread);
    s.refusal_probability = j.value("refusal_probability", s.refusal_probability);
    if (j.contains("temperature_scaling")) {
      s.temperature_scaling.floor = j["temperature_scaling"].value("floor", 1.0);
      s.temperature_scaling.slope = j["temperature_scaling"].value("slope", 0.0);
    }
    s.mini_model = j.value("mini_model", s.mini_model);
    s.full_model = j.value("full_model", s.full_model);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed scenario: ") + e.what());
  }
  validate(s);
  return s;
}

nlohmann::json scenario_to_json(const ScenarioSpec& s) {
  nlohmann::json mix = nlohmann::json::object();
  for (const auto& [c, w] : s.category_mix) mix[std::string(category_name(c))] = w;
  return {{"n_examples", s.n_examples},
          {"category_mix", mix},
          {"delta_mu", s.delta_mu},
          {"sigma", s.sigma},
          {"capability_gap", s.capability_gap},
          {"std_correlation", s.std_correlation},
          {"std_spread", s.std_spread},
          {"refusal_probability", s.refusal_probability},
          {"temperature_scaling",
           {{"floor", s.temperature_scaling.floor},
            {"slope", s.temperature_scaling.slope}}},
          {"mini_model", s.mini_model},
          {"full_model", s.full_model},
          {"seed", s.seed}};
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open scenario '" + path.string() + "'");
  try {
    return scenario_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kConfig, std::string("malformed scenario: ") + e.what());
  }
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  validate(spec);
  Rng rng(combine_seed(spec.seed, hash_string("scenario")));

  std::vector<Category> cats = category_sequence(spec);
  for (std::size_t i = cats.size(); i > 1; --i) {
    std::swap(cats[i - 1], cats[rng.below(i)]);
  }

  const double a = std::sqrt(std::abs(spec.std_correlation));
  const double b = std::sqrt(1.0 - a * a);
  const double sign = spec.std_correlation < 0.0 ? -1.0 : 1.0;

  Scenario out;
  out.profiles.temperature_scaling = spec.temperature_scaling;
  auto& mini = out.profiles.models[spec.mini_model];
  auto& full = out.profiles.models[spec.full_model];
  const int width = static_cast<int>(std::to_string(spec.n_examples).size());

  std::vector<Example> examples;
  examples.reserve(spec.n_examples);
  for (std::size_t n = 0; n < spec.n_examples; ++n) {
    Example ex;
    ex.id = fmt::format("sim-{:0{}}", n, width);
    ex.category = cats[n];
    ex.query = fmt::format("Synthetic query for {} ({}).", ex.id,
                           category_name(ex.category));
    for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
      ex.responses[i] = fmt::format("Synthetic response {} to {}.", i, ex.id);
    }
    ex.chosen_index = 0;

    // Shared per-example difficulty drives both models' stds.
    const double d = rng.normal();
    ResponseProfiles pm, pf;
    for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
      const double um = a * d + b * rng.normal();
      const double uf = sign * a * d + b * rng.normal();
      pm[i].mean = kBaseMean + (i == 0 ? spec.delta_mu : 0.0);
      pf[i].mean = kBaseMean + (i == 0 ? spec.delta_mu * spec.capability_gap : 0.0);
      pm[i].std = spec.sigma * std::max(0.0, 1.0 + spec.std_spread * um);
      pf[i].std = spec.sigma * std::max(0.0, 1.0 + spec.std_spread * uf);
      pm[i].refusal_probability = spec.refusal_probability;
      pf[i].refusal_probability = spec.refusal_probability;
    }
    mini[ex.id] = pm;
    full[ex.id] = pf;
    examples.push_back(std::move(ex));
  }
  out.dataset = Dataset(std::move(examples));
  return out;
}

}  // namespace judgekit
