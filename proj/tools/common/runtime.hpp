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

// Pieces shared by the command line tools: dataset and model setup and
// uniform error reporting.
#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "xp/explain/suite.hpp"

namespace xp::tools {

// Without a CSV the synthetic loan set is generated from rows and seed;
// xp-datagen writes the same set to disk with the same defaults.
struct ExplainerOptions {
  std::string dataset;  // CSV path, optional
  std::size_t rows = 500;
  std::uint64_t data_seed = 7;
  std::string model = "logistic";  // logistic | tree
  std::uint64_t seed = 42;
};

void add_explainer_flags(CLI::App& app, ExplainerOptions& options);

std::shared_ptr<const explain::ExplainerContext> make_explainer(const ExplainerOptions& options);

// Prints "error: <code>: <message>" to stderr and returns the exit status.
int report_error(const std::exception& e);

}  // namespace xp::tools
