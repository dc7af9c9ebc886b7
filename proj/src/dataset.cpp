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

#include "judgekit/dataset.hpp"

#include <fstream>
#include <sstream>

#include "judgekit/errors.hpp"

namespace judgekit {
namespace {

[[noreturn]] void invalid(std::size_t line_number, const std::string& what) {
  fail(ErrorCode::kValidation,
       "line " + std::to_string(line_number) + ": " + what);
}

const nlohmann::json& require_string(const nlohmann::json& record,
                                     const char* field,
                                     std::size_t line_number) {
  auto it = record.find(field);
  if (it == record.end()) {
    invalid(line_number, std::string("missing field '") + field + "'");
  }
  if (!it->is_string()) {
    invalid(line_number, std::string("field '") + field + "' must be a string");
  }
  return *it;
}

}  // namespace

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kFactuality: return "Factuality";
    case Category::kFocus: return "Focus";
    case Category::kMath: return "Math";
    case Category::kPreciseIF: return "PreciseIF";
    case Category::kSafety: return "Safety";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view name) {
  for (Category c : kAllCategories) {
    if (name == category_name(c)) return c;
  }
  if (name == "Precise IF") return Category::kPreciseIF;
  return std::nullopt;
}

Dataset::Dataset(std::vector<Example> examples) : examples_(std::move(examples)) {
  for (Category c : kAllCategories) category_index_[c];
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& e = examples_[i];
    if (e.chosen_index < 0 ||
        e.chosen_index >= static_cast<int>(kResponsesPerExample)) {
      fail(ErrorCode::kValidation,
           "example '" + e.id + "': chosen_index out of range");
    }
    if (!by_id_.emplace(e.id, i).second) {
      fail(ErrorCode::kValidation, "duplicate example id '" + e.id + "'");
    }
    category_index_[e.category].push_back(e.id);
  }
}

const Example* Dataset::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &examples_[it->second];
}

const Example& Dataset::at(std::string_view id) const {
  const Example* e = find(id);
  if (e == nullptr) {
    fail(ErrorCode::kValidation, "unknown example id '" + std::string(id) + "'");
  }
  return *e;
}

const std::vector<std::string>& Dataset::ids_in(Category c) const {
  static const std::vector<std::string> kEmpty;
  auto it = category_index_.find(c);
  return it == category_index_.end() ? kEmpty : it->second;
}

Example parse_example(std::string_view line, std::size_t line_number) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    invalid(line_number, std::string("malformed record: ") + e.what());
  }
  if (!record.is_object()) invalid(line_number, "record must be an object");

  Example ex;
  ex.id = require_string(record, "id", line_number).get<std::string>();
  if (ex.id.empty()) invalid(line_number, "id must be non-empty");

  const std::string cat =
      require_string(record, "category", line_number).get<std::string>();
  auto parsed = parse_category(cat);
  if (!parsed) invalid(line_number, "unknown category '" + cat + "'");
  ex.category = *parsed;

  ex.query = require_string(record, "query", line_number).get<std::string>();

  auto responses = record.find("responses");
  if (responses == record.end() || !responses->is_array()) {
    invalid(line_number, "field 'responses' must be an array");
  }
  if (responses->size() != kResponsesPerExample) {
    invalid(line_number, "expected exactly 4 responses, got " +
                             std::to_string(responses->size()));
  }
  for (std::size_t i = 0; i < kResponsesPerExample; ++i) {
    if (!(*responses)[i].is_string()) {
      invalid(line_number, "responses must be strings");
    }
    ex.responses[i] = (*responses)[i].get<std::string>();
  }

  if (auto chosen = record.find("chosen_index"); chosen != record.end()) {
    if (!chosen->is_number_integer()) {
      invalid(line_number, "chosen_index must be an integer");
    }
    ex.chosen_index = chosen->get<int>();
    if (ex.chosen_index < 0 || ex.chosen_index > 3) {
      invalid(line_number, "chosen_index must be in [0, 3]");
    }
  }

  for (auto it = record.begin(); it != record.end(); ++it) {
    const std::string& key = it.key();
    if (key == "id" || key == "category" || key == "query" ||
        key == "responses" || key == "chosen_index") {
      continue;
    }
    ex.extra[key] = it.value();
  }
  return ex;
}

nlohmann::json example_to_json(const Example& e) {
  nlohmann::json j = e.extra;
  j["id"] = e.id;
  j["category"] = std::string(category_name(e.category));
  j["query"] = e.query;
  j["responses"] = e.responses;
  j["chosen_index"] = e.chosen_index;
  return j;
}

Dataset parse_dataset(std::string_view text) {
  std::vector<Example> examples;
  std::map<std::string, std::size_t> seen;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_number;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    Example ex = parse_example(line, line_number);
    auto [it, inserted] = seen.emplace(ex.id, line_number);
    if (!inserted) {
      invalid(line_number, "duplicate id '" + ex.id + "' (first seen on line " +
                               std::to_string(it->second) + ")");
    }
    examples.push_back(std::move(ex));
    if (end == text.size()) break;
  }
  return Dataset(std::move(examples));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "error reading '" + path.string() + "'");
  return parse_dataset(buf.str());
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const Example& e : dataset.examples()) {
    out += example_to_json(e).dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << serialize_dataset(dataset);
}

std::map<Category, std::size_t> category_counts(const Dataset& dataset) {
  std::map<Category, std::size_t> counts;
  for (Category c : kAllCategories) counts[c] = 0;
  for (const Example& e : dataset.examples()) ++counts[e.category];
  return counts;
}

}  // namespace judgekit
