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

#include "xp/explain/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xp/error.hpp"
#include "xp/rng.hpp"

namespace xp::explain {

using nlohmann::json;

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

FeatureSpec FeatureSpec::numeric(std::string name, double min, double max, std::string display) {
  FeatureSpec f;
  f.name = std::move(name);
  f.display_name = std::move(display);
  f.kind = FeatureKind::kNumeric;
  f.min = min;
  f.max = max;
  return f;
}

FeatureSpec FeatureSpec::categorical(std::string name, std::vector<std::string> levels,
                                     std::string display) {
  FeatureSpec f;
  f.name = std::move(name);
  f.display_name = std::move(display);
  f.kind = FeatureKind::kCategorical;
  f.levels = std::move(levels);
  return f;
}

std::string_view outcome_name(int label) { return label == kApproved ? "approved" : "rejected"; }

TabularDataset::TabularDataset(std::vector<FeatureSpec> features, std::vector<Instance> rows,
                               std::vector<int> labels, std::string name)
    : name_(std::move(name)), features_(std::move(features)), rows_(std::move(rows)),
      labels_(std::move(labels)) {
  if (features_.empty()) throw Error(ErrorCode::kSchemaError, "dataset has no features");
  if (rows_.size() != labels_.size()) {
    throw Error(ErrorCode::kSchemaError, "row and label counts differ");
  }
  std::set<std::string, std::less<>> names;
  for (const auto& f : features_) {
    if (!names.insert(f.name).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate feature '" + f.name + "'");
    }
    if (f.kind == FeatureKind::kNumeric && !(f.min <= f.max)) {
      throw Error(ErrorCode::kSchemaError, "feature '" + f.name + "' has min > max");
    }
    if (f.kind == FeatureKind::kCategorical && f.levels.empty()) {
      throw Error(ErrorCode::kSchemaError, "categorical feature '" + f.name + "' has no levels");
    }
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    try {
      check_instance(rows_[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaError, "row " + std::to_string(i) + ": " + e.what());
    }
    if (labels_[i] != kRejected && labels_[i] != kApproved) {
      throw Error(ErrorCode::kSchemaError, "row " + std::to_string(i) + ": label must be 0 or 1");
    }
  }
}

std::optional<std::size_t> TabularDataset::find_feature(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t TabularDataset::feature_index(std::string_view name) const {
  auto index = find_feature(name);
  if (!index) throw Error(ErrorCode::kUnknownFeature, "unknown feature '" + std::string(name) + "'");
  return *index;
}

void TabularDataset::check_instance(const Instance& x) const {
  if (x.size() != features_.size()) {
    throw Error(ErrorCode::kInvalidInstance, "instance has " + std::to_string(x.size()) +
                                                 " values, expected " + std::to_string(features_.size()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& f = features_[j];
    const double v = x[j];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidInstance, "feature '" + f.name + "' is not finite");
    }
    if (f.kind == FeatureKind::kNumeric) {
      if (v < f.min || v > f.max) {
        throw Error(ErrorCode::kInvalidInstance, "feature '" + f.name + "' value " + format_number(v) +
                                                     " outside [" + format_number(f.min) + ", " +
                                                     format_number(f.max) + "]");
      }
    } else if (v != std::floor(v) || v < 0 || v >= static_cast<double>(f.levels.size())) {
      throw Error(ErrorCode::kInvalidInstance, "feature '" + f.name + "' has no level " + format_number(v));
    }
  }
}

Instance TabularDataset::baseline() const {
  Instance b(features_.size(), 0.0);
  for (std::size_t j = 0; j < features_.size(); ++j) {
    const auto& f = features_[j];
    if (rows_.empty()) {
      b[j] = f.kind == FeatureKind::kNumeric ? f.min : 0.0;
      continue;
    }
    if (f.kind == FeatureKind::kNumeric) {
      double sum = 0.0;
      for (const auto& row : rows_) sum += row[j];
      b[j] = std::clamp(sum / static_cast<double>(rows_.size()), f.min, f.max);
    } else {
      std::vector<std::size_t> counts(f.levels.size(), 0);
      for (const auto& row : rows_) ++counts[static_cast<std::size_t>(row[j])];
      b[j] = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
  }
  return b;
}

std::size_t TabularDataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::string TabularDataset::format_value(std::size_t feature, double value) const {
  const auto& f = features_.at(feature);
  if (f.kind == FeatureKind::kCategorical) {
    std::string level = f.levels.at(static_cast<std::size_t>(value));
    std::replace(level.begin(), level.end(), '_', ' ');
    return level;
  }
  double rounded = std::round(value * 100.0) / 100.0;
  return format_number(rounded == 0.0 ? 0.0 : rounded);
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

TabularDataset parse_csv(std::string_view text, const json* meta, std::string name) {
  std::vector<std::vector<std::string>> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty() || line == "\r") continue;
    lines.push_back(split_line(line));
  }
  if (lines.empty()) throw Error(ErrorCode::kSchemaError, "CSV is empty");
  const auto header = lines.front();
  if (header.size() < 2 || header.back() != "label") {
    throw Error(ErrorCode::kSchemaError, "CSV header must end with a 'label' column");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].size() != header.size()) {
      throw Error(ErrorCode::kSchemaError, "CSV line " + std::to_string(r + 1) + " has " +
                                               std::to_string(lines[r].size()) + " cells");
    }
  }

  std::map<std::string, json> meta_by_name;
  if (meta) {
    if (!meta->is_object() || !meta->contains("features") || !(*meta)["features"].is_array()) {
      throw Error(ErrorCode::kSchemaError, "metadata must hold a 'features' array");
    }
    for (const auto& f : (*meta)["features"]) meta_by_name[f.at("name").get<std::string>()] = f;
    if (meta->contains("name")) name = (*meta)["name"].get<std::string>();
  }

  std::vector<FeatureSpec> features;
  for (std::size_t j = 0; j < d; ++j) {
    FeatureSpec f;
    f.name = header[j];
    auto it = meta_by_name.find(f.name);
    bool numeric = true;
    if (it != meta_by_name.end()) {
      const json& m = it->second;
      f.display_name = m.value("display_name", std::string{});
      numeric = m.value("kind", std::string("numeric")) == "numeric";
      if (numeric) {
        f.min = m.at("min").get<double>();
        f.max = m.at("max").get<double>();
      } else {
        f.levels = m.at("levels").get<std::vector<std::string>>();
      }
    } else {
      for (std::size_t r = 1; r < lines.size() && numeric; ++r) numeric = parse_number(lines[r][j]).has_value();
      if (numeric) {
        f.min = lines.size() > 1 ? std::numeric_limits<double>::infinity() : 0.0;
        f.max = lines.size() > 1 ? -std::numeric_limits<double>::infinity() : 0.0;
        for (std::size_t r = 1; r < lines.size(); ++r) {
          double v = *parse_number(lines[r][j]);
          f.min = std::min(f.min, v);
          f.max = std::max(f.max, v);
        }
      } else {
        std::set<std::string> levels;
        for (std::size_t r = 1; r < lines.size(); ++r) levels.insert(lines[r][j]);
        f.levels.assign(levels.begin(), levels.end());
      }
    }
    f.kind = numeric ? FeatureKind::kNumeric : FeatureKind::kCategorical;
    features.push_back(std::move(f));
  }

  std::vector<Instance> rows;
  std::vector<int> labels;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    Instance x(d);
    for (std::size_t j = 0; j < d; ++j) {
      const auto& cell = lines[r][j];
      if (features[j].kind == FeatureKind::kNumeric) {
        auto v = parse_number(cell);
        if (!v) throw Error(ErrorCode::kSchemaError, "line " + std::to_string(r + 1) + ": '" + cell + "' is not a number");
        x[j] = *v;
      } else {
        const auto& levels = features[j].levels;
        auto it = std::find(levels.begin(), levels.end(), cell);
        if (it == levels.end()) {
          throw Error(ErrorCode::kSchemaError, "line " + std::to_string(r + 1) + ": unknown level '" + cell + "'");
        }
        x[j] = static_cast<double>(it - levels.begin());
      }
    }
    const auto& label_cell = lines[r][d];
    if (label_cell != "0" && label_cell != "1") {
      throw Error(ErrorCode::kSchemaError, "line " + std::to_string(r + 1) + ": label must be 0 or 1");
    }
    rows.push_back(std::move(x));
    labels.push_back(label_cell == "1" ? kApproved : kRejected);
  }
  return TabularDataset(std::move(features), std::move(rows), std::move(labels), std::move(name));
}

TabularDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::path meta_path = path;
  meta_path.replace_extension(".meta.json");
  std::string stem = path.stem().string();
  if (std::filesystem::exists(meta_path)) {
    std::ifstream min(meta_path);
    json meta = json::parse(min, nullptr, false);
    if (meta.is_discarded()) throw Error(ErrorCode::kSchemaError, "malformed " + meta_path.string());
    return parse_csv(buf.str(), &meta, stem);
  }
  return parse_csv(buf.str(), nullptr, stem);
}

std::string to_csv(const TabularDataset& data) {
  std::string out;
  for (const auto& f : data.features()) out += f.name + ",";
  out += "label\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto& row = data.rows()[r];
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto& f = data.feature(j);
      out += f.kind == FeatureKind::kNumeric ? format_number(row[j])
                                              : f.levels[static_cast<std::size_t>(row[j])];
      out += ',';
    }
    out += std::to_string(data.labels()[r]);
    out += '\n';
  }
  return out;
}

json metadata_json(const TabularDataset& data) {
  json features = json::array();
  for (const auto& f : data.features()) {
    json m = {{"name", f.name}, {"display_name", f.label()}};
    if (f.kind == FeatureKind::kNumeric) {
      m["kind"] = "numeric";
      m["min"] = f.min;
      m["max"] = f.max;
    } else {
      m["kind"] = "categorical";
      m["levels"] = f.levels;
    }
    features.push_back(std::move(m));
  }
  return json{{"name", data.name()}, {"features", std::move(features)}};
}

TabularDataset generate_loan_dataset(std::size_t n, std::uint64_t seed) {
  std::vector<FeatureSpec> features = {
      FeatureSpec::numeric("loan_amnt", 1000, 40000, "loan amount"),
      FeatureSpec::numeric("int_rate", 5, 30, "interest rate"),
      FeatureSpec::numeric("annual_inc", 10000, 250000, "annual income"),
      FeatureSpec::numeric("dti", 0, 40, "debt-to-income ratio"),
      FeatureSpec::numeric("emp_length", 0, 10, "employment length"),
      FeatureSpec::categorical("verification_status", {"not_verified", "source_verified", "verified"},
                               "income verification status"),
      FeatureSpec::categorical("home_ownership", {"mortgage", "own", "rent"}, "home ownership"),
      FeatureSpec::categorical("purpose",
                               {"credit_card", "debt_consolidation", "home_improvement",
                                "major_purchase", "vacation"},
                               "loan purpose"),
  };
  const double verification_effect[] = {-0.9, 0.3, 0.6};
  const double home_effect[] = {0.3, 0.2, -0.3};
  const double purpose_effect[] = {0.1, 0.0, 0.2, -0.1, -0.5};

  Rng rng(seed);
  std::vector<Instance> rows;
  std::vector<int> labels;
  rows.reserve(n);
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Instance x(8);
    x[0] = round_to(rng.uniform(1000, 40000), 500);
    x[1] = round_to(std::clamp(15.0 + 5.0 * rng.normal(), 5.0, 30.0), 0.01);
    x[2] = round_to(std::clamp(60000.0 * std::exp(0.5 * rng.normal()), 10000.0, 250000.0), 1000);
    x[3] = round_to(rng.uniform(0, 40), 0.1);
    x[4] = static_cast<double>(rng.below(11));
    x[5] = static_cast<double>(rng.below(3));
    x[6] = static_cast<double>(rng.below(3));
    x[7] = static_cast<double>(rng.below(5));
    double logit = 0.2 - 0.45 * (x[1] - 15.0) + 1.5 * std::log(x[2] / 60000.0) - 0.05 * (x[3] - 20.0) -
                   0.4 * (x[0] - 20000.0) / 10000.0 + 0.08 * (x[4] - 5.0) +
                   verification_effect[static_cast<int>(x[5])] + home_effect[static_cast<int>(x[6])] +
                   purpose_effect[static_cast<int>(x[7])];
    labels.push_back(logit + 0.8 * rng.normal() > 0.0 ? kApproved : kRejected);
    rows.push_back(std::move(x));
  }
  return TabularDataset(std::move(features), std::move(rows), std::move(labels), "loan_applications");
}

std::vector<std::size_t> test_sample_rows(const TabularDataset& data) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.size(); i += 5) out.push_back(i);
  return out;
}

}  // namespace xp::explain
