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

// xp-simulate: runs a paired cohort of scripted users (each script once in
// group A and once, with its followups, in group B) and writes the session
// logs to --data-dir, ready for xp-analytics.

#include <cstdint>
#include <iostream>
#include <memory>
#include <string>

#include "runtime.hpp"
#include "xp/iff/iff.hpp"
#include "xp/session/store.hpp"
#include "xp/sim/simulator.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate scripted sessions"};
  std::string iff_path;
  std::string data_dir;
  std::size_t sessions = 50;
  std::uint64_t seed = 1;
  xp::tools::ExplainerOptions explainer;
  app.add_option("--iff", iff_path, "IFF document")->required()->check(CLI::ExistingFile);
  app.add_option("--data-dir", data_dir, "Session log directory")->required();
  app.add_option("--sessions", sessions, "Scripts per group")->capture_default_str();
  app.add_option("--seed", seed, "Script and service seed")->capture_default_str();
  xp::tools::add_explainer_flags(app, explainer);
  CLI11_PARSE(app, argc, argv);

  try {
    auto graph = std::make_shared<const xp::iff::IffGraph>(xp::iff::load_iff_file(iff_path));
    xp::session::ServiceConfig config;
    config.graph = graph;
    config.explainer = xp::tools::make_explainer(explainer);
    config.seed = seed;
    xp::sim::Simulator sim(config, std::make_shared<xp::session::FileStore>(data_dir));
    const auto cohort = xp::sim::run_paired_cohort(sim, *graph, sessions, seed);

    std::size_t skipped = 0;
    std::size_t errors = 0;
    for (const auto* group : {&cohort.a, &cohort.b}) {
      for (const auto& run : *group) {
        skipped += run.skipped_steps;
        errors += run.protocol_errors;
      }
    }
    std::cout << "simulated " << cohort.a.size() << " A and " << cohort.b.size() << " B sessions into "
              << data_dir << " (" << skipped << " skipped steps, " << errors << " protocol errors)\n";
    return 0;
  } catch (const std::exception& e) {
    return xp::tools::report_error(e);
  }
}
