/*
 * Copyright 2026 The xp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Tabular data with mixed numeric and categorical features.
//
// An Instance stores one double per feature. Categorical values are encoded
// as the index of the level in FeatureSpec::levels.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace xp::explain {

using Instance = std::vector<double>;

enum class FeatureKind { kNumeric, kCategorical };

struct FeatureSpec {
  std::string name;
  std::string display_name;  // plain-language name; falls back to `name`
  FeatureKind kind = FeatureKind::kNumeric;
  double min = 0.0;  // numeric only
  double max = 0.0;
  std::vector<std::string> levels;  // categorical only

  static FeatureSpec numeric(std::string name, double min, double max, std::string display = {});
  static FeatureSpec categorical(std::string name, std::vector<std::string> levels,
                                 std::string display = {});

  double range() const { return max - min; }
  const std::string& label() const { return display_name.empty() ? name : display_name; }

  bool operator==(const FeatureSpec&) const = default;
};

inline constexpr int kRejected = 0;
inline constexpr int kApproved = 1;

std::string_view outcome_name(int label);  // "approved" / "rejected"

class TabularDataset {
 public:
  // Throws kSchemaError when a row violates its feature spec or a label is
  // not 0/1.
  TabularDataset(std::vector<FeatureSpec> features, std::vector<Instance> rows,
                 std::vector<int> labels, std::string name = "dataset");

  const std::string& name() const { return name_; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& feature(std::size_t index) const { return features_.at(index); }
  std::size_t feature_count() const { return features_.size(); }
  const std::vector<Instance>& rows() const { return rows_; }
  const std::vector<int>& labels() const { return labels_; }
  std::size_t size() const { return rows_.size(); }

  std::optional<std::size_t> find_feature(std::string_view name) const;
  // Throws kUnknownFeature.
  std::size_t feature_index(std::string_view name) const;

  // Throws kInvalidInstance when x has the wrong width, a numeric value is
  // outside [min, max] or a categorical code is not a level index.
  void check_instance(const Instance& x) const;

  // Per-feature mean for numeric features and mode for categorical ones.
  Instance baseline() const;

  std::size_t count_label(int label) const;

  // Human readable value, e.g. "12.5" or "source verified".
  std::string format_value(std::size_t feature, double value) const;

 private:
  std::string name_;
  std::vector<FeatureSpec> features_;
  std::vector<Instance> rows_;
  std::vector<int> labels_;
};

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// CSV with a header row and a trailing `label` column. Categorical cells hold
// level names. The optional metadata document fixes feature kinds, bounds,
// level order and display names; without it kinds are inferred (a column is
// numeric when every cell parses as a number) and bounds come from the data.
TabularDataset parse_csv(std::string_view text, const nlohmann::json* meta = nullptr,
                         std::string name = "dataset");
// Reads `<stem>.meta.json` next to the CSV when present.
TabularDataset load_csv(const std::filesystem::path& path);
std::string to_csv(const TabularDataset& data);
nlohmann::json metadata_json(const TabularDataset& data);

// Synthetic loan applications: 8 features (loan_amnt, int_rate, annual_inc,
// dti, emp_length, verification_status, home_ownership, purpose) and a noisy
// approval label driven mostly by interest rate, income and verification.
TabularDataset generate_loan_dataset(std::size_t rows, std::uint64_t seed);

// Rows reserved as explanation targets: every fifth row.
std::vector<std::size_t> test_sample_rows(const TabularDataset& data);

}  // namespace xp::explain
