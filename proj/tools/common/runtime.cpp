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

#include "runtime.hpp"

#include <iostream>

#include "xp/error.hpp"
#include "xp/explain/dataset.hpp"
#include "xp/explain/model.hpp"

namespace xp::tools {

void add_explainer_flags(CLI::App& app, ExplainerOptions& options) {
  app.add_option("--dataset", options.dataset, "Loan CSV (with optional .meta.json); generated when absent");
  app.add_option("--rows", options.rows, "Rows of the generated dataset")->capture_default_str();
  app.add_option("--data-seed", options.data_seed, "Seed of the generated dataset")->capture_default_str();
  app.add_option("--model", options.model, "Reference model")
      ->check(CLI::IsMember({"logistic", "tree"}))
      ->capture_default_str();
}

std::shared_ptr<const explain::ExplainerContext> make_explainer(const ExplainerOptions& options) {
  auto data = std::make_shared<const explain::TabularDataset>(
      options.dataset.empty() ? explain::generate_loan_dataset(options.rows, options.data_seed)
                              : explain::load_csv(options.dataset));
  const auto kind = options.model == "tree" ? explain::ModelKind::kTreeSurrogate
                                            : explain::ModelKind::kLogisticSurrogate;
  auto model = explain::train_reference_model(*data, kind, options.seed);
  explain::ExplainerConfig config;
  config.seed = options.seed;
  return std::make_shared<const explain::ExplainerContext>(data, model, config);
}

int report_error(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    std::cerr << "error: " << error_code_name(err->code()) << ": " << err->what() << "\n";
  } else {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace xp::tools
