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

// xp-datagen: writes the synthetic loan dataset as <out>.csv plus
// <out>.meta.json, and reports the reference model's training accuracy.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "runtime.hpp"
#include "xp/analytics/analytics.hpp"
#include "xp/explain/dataset.hpp"
#include "xp/explain/model.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic loan dataset"};
  std::size_t rows = 500;
  std::uint64_t seed = 7;
  std::string out;
  app.add_option("--rows", rows, "Number of applications")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--out", out, "Output CSV path")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto data = xp::explain::generate_loan_dataset(rows, seed);
    std::filesystem::path csv(out);
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    auto meta = csv;
    meta.replace_extension(".meta.json");
    xp::analytics::write_text(csv, xp::explain::to_csv(data));
    xp::analytics::write_text(meta, xp::explain::metadata_json(data).dump(2) + "\n");

    for (auto kind : {xp::explain::ModelKind::kLogisticSurrogate, xp::explain::ModelKind::kTreeSurrogate}) {
      const auto model = xp::explain::train_reference_model(data, kind, seed);
      std::cout << xp::explain::to_string(kind) << " accuracy " << xp::explain::accuracy(*model, data) << "\n";
    }
    std::cout << "wrote " << csv.string() << " (" << data.size() << " rows, "
              << data.count_label(xp::explain::kApproved) << " approved)\n";
    return 0;
  } catch (const std::exception& e) {
    return xp::tools::report_error(e);
  }
}
