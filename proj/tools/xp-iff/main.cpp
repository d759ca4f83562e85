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

// xp-iff: check and inspect intent fulfilment graphs.
//
//   xp-iff validate <file> [--json]    exit 1 when the report has errors
//   xp-iff print <file>                canonical form
//   xp-iff view <file> --group <g>     the graph one user group sees

#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "runtime.hpp"
#include "xp/iff/iff.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Validate and inspect IFF documents"};
  app.require_subcommand(1);

  std::string file;
  bool as_json = false;
  auto* validate = app.add_subcommand("validate", "Check every graph invariant");
  validate->add_option("file", file, "*.iff.json document")->required()->check(CLI::ExistingFile);
  validate->add_flag("--json", as_json, "Print the report as JSON");

  auto* print = app.add_subcommand("print", "Print the canonical serialisation");
  print->add_option("file", file, "*.iff.json document")->required()->check(CLI::ExistingFile);

  std::string group;
  auto* view = app.add_subcommand("view", "Print the view of one user group");
  view->add_option("file", file, "*.iff.json document")->required()->check(CLI::ExistingFile);
  view->add_option("--group", group, "User group")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto graph = xp::iff::load_iff_file(file);
    if (*validate) {
      const auto report = xp::iff::validate_iff(graph);
      if (as_json) {
        std::cout << xp::iff::report_to_json(report).dump(2) << "\n";
      } else {
        for (const auto& f : report.findings) {
          std::cout << xp::iff::to_string(f.severity) << " " << f.code << " " << f.location << ": "
                    << f.message << "\n";
        }
        std::cout << (report.ok ? "ok" : "invalid") << " (" << report.error_count() << " errors, "
                  << report.warning_count() << " warnings, " << graph.questions.size() << " questions)\n";
      }
      return report.ok ? 0 : 1;
    }
    if (*print) {
      std::cout << xp::iff::serialize_iff(graph);
      return 0;
    }
    std::cout << xp::iff::serialize_iff(xp::iff::select_view(graph, group));
    return 0;
  } catch (const std::exception& e) {
    return xp::tools::report_error(e);
  }
}
