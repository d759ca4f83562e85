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

// Shared fixtures: the shipped loan graph and a small explainer context
// over the synthetic loan data.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "xp/explain/suite.hpp"
#include "xp/iff/iff.hpp"

namespace xp::testing {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(XP_TEST_DATA_DIR) / relative;
}

inline std::filesystem::path fixture_path(const std::string& relative) {
  return std::filesystem::path(XP_TEST_FIXTURE_DIR) / relative;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  return nlohmann::json::parse(read_file(path));
}

inline std::shared_ptr<const iff::IffGraph> loan_graph() {
  static const auto graph =
      std::make_shared<const iff::IffGraph>(iff::load_iff_file(data_path("iff/loan_approval.iff.json")));
  return graph;
}

inline std::shared_ptr<const iff::IffGraph> bank_graph() {
  static const auto graph =
      std::make_shared<const iff::IffGraph>(iff::load_iff_file(data_path("iff/sample_bank.iff.json")));
  return graph;
}

// Same dataset defaults as the command line tools.
inline std::shared_ptr<const explain::TabularDataset> loan_data() {
  static const auto data = std::make_shared<const explain::TabularDataset>(explain::generate_loan_dataset(500, 7));
  return data;
}

inline std::shared_ptr<const explain::ExplainerContext> loan_explainer(std::uint64_t seed = 42) {
  auto model = explain::train_reference_model(*loan_data(), explain::ModelKind::kLogisticSurrogate, seed);
  explain::ExplainerConfig config;
  config.seed = seed;
  return std::make_shared<const explain::ExplainerContext>(loan_data(), model, config);
}

// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("xp-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace xp::testing
