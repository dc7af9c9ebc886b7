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
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace judgekit {

enum class Category { kFactuality, kFocus, kMath, kPreciseIF, kSafety };

inline constexpr std::array<Category, 5> kAllCategories = {
    Category::kFactuality, Category::kFocus, Category::kMath,
    Category::kPreciseIF, Category::kSafety};

inline constexpr std::size_t kResponsesPerExample = 4;

std::string_view category_name(Category c);
// Accepts the canonical names ("Factuality", "Focus", "Math", "PreciseIF",
// "Safety") plus the benchmark's own spellings ("Precise IF").
std::optional<Category> parse_category(std::string_view name);

struct Example {
  std::string id;
  Category category = Category::kFactuality;
  std::string query;
  std::array<std::string, kResponsesPerExample> responses;
  int chosen_index = 0;
  // Unknown fields from the source record, kept for round-tripping.
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const Example&, const Example&) = default;
};

// Immutable after construction. Lookup by id and by category is O(log n).
class Dataset {
 public:
  Dataset() = default;
  // Throws Error(kValidation) on duplicate ids or out-of-range chosen_index.
  explicit Dataset(std::vector<Example> examples);

  const std::vector<Example>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  const Example* find(std::string_view id) const;
  const Example& at(std::string_view id) const;

  // Ids in load order for one category; empty vector if none.
  const std::vector<std::string>& ids_in(Category c) const;
  const std::map<Category, std::vector<std::string>>& category_index() const {
    return category_index_;
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.examples_ == b.examples_;
  }

 private:
  std::vector<Example> examples_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::map<Category, std::vector<std::string>> category_index_;
};

// Parses one JSON line. `line_number` is 1-based and only used in messages.
Example parse_example(std::string_view line, std::size_t line_number);
nlohmann::json example_to_json(const Example& e);

Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::string_view text);
std::string serialize_dataset(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

std::map<Category, std::size_t> category_counts(const Dataset& dataset);

}  // namespace judgekit
