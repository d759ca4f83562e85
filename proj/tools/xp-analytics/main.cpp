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

// xp-analytics: analyses over a session log directory.
//
//   flag      time-based acceptance verdict per session
//   pathway   labelled time segments per session
//   coverage  intents engaged per session
//   likert    satisfaction counts, group B minus group A
//   render    pathway bars as SVG
//
// Output goes to --out, or stdout when absent.

#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "runtime.hpp"
#include "xp/analytics/analytics.hpp"
#include "xp/session/store.hpp"

namespace {

using namespace xp::analytics;

struct Options {
  std::string logs;
  double estimated_minutes = 15.0;
  std::string format = "csv";
  std::string out;
  bool no_merge = false;
  bool accepted_only = false;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Options& o,
                      bool formats) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--logs", o.logs, "Session log directory")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--estimated-minutes", o.estimated_minutes, "Estimated session length")
      ->capture_default_str();
  sub->add_option("--out", o.out, "Output file");
  if (formats) {
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
  return sub;
}

std::vector<SessionRecord> accepted(const std::vector<SessionRecord>& records, double estimated_minutes) {
  const auto flags = flag_sessions(records, estimated_minutes);
  std::vector<SessionRecord> kept;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (flags[i].verdict == Verdict::kAccept) kept.push_back(records[i]);
  }
  return kept;
}

std::vector<PathwaySegment> all_pathways(const std::vector<SessionRecord>& records, bool merge) {
  std::vector<PathwaySegment> segments;
  for (const auto& r : records) {
    if (r.events.empty()) continue;
    auto p = pathway(r, PathwayOptions{merge});
    segments.insert(segments.end(), p.begin(), p.end());
  }
  return segments;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text(o.out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analyse conversation logs"};
  app.require_subcommand(1);
  Options o;
  auto* flag = add_command(app, "flag", "Time-based acceptance flags", o, true);
  auto* path = add_command(app, "pathway", "Conversation pathway segments", o, true);
  auto* coverage = add_command(app, "coverage", "Intent coverage", o, true);
  auto* likert = add_command(app, "likert", "Questionnaire counts, B minus A", o, true);
  auto* render = add_command(app, "render", "Pathway bars as SVG", o, false);
  for (auto* sub : {path, render}) sub->add_flag("--no-merge", o.no_merge, "Keep followups as own segments");
  for (auto* sub : {path, coverage, likert, render}) {
    sub->add_flag("--accepted-only", o.accepted_only, "Drop sessions the time filter rejects");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    auto records = xp::session::load_records(o.logs);
    const bool json_out = o.format == "json";
    if (*flag) {
      const auto flags = flag_sessions(records, o.estimated_minutes);
      emit(o, json_out ? flags_json(flags).dump(2) + "\n" : flags_csv(flags));
      return 0;
    }
    if (o.accepted_only) records = accepted(records, o.estimated_minutes);
    if (*path) {
      const auto segments = all_pathways(records, !o.no_merge);
      emit(o, json_out ? pathways_json(segments).dump(2) + "\n" : pathways_csv(segments));
    } else if (*coverage) {
      const auto cov = intent_coverage(records);
      emit(o, json_out ? coverage_json(cov).dump(2) + "\n" : coverage_csv(cov));
    } else if (*likert) {
      std::vector<SessionRecord> a;
      std::vector<SessionRecord> b;
      std::size_t unfinished = 0;
      for (auto& r : records) {
        if (!r.questionnaire) {
          ++unfinished;
          continue;
        }
        (r.group == xp::session::Group::kA ? a : b).push_back(std::move(r));
      }
      if (unfinished) std::cerr << "skipped " << unfinished << " sessions without a questionnaire\n";
      const auto diff = likert_diff(a, b);
      emit(o, json_out ? likert_json(diff).dump(2) + "\n" : likert_csv(diff));
    } else if (*render) {
      emit(o, render_pathways_svg(all_pathways(records, !o.no_merge)));
    }
    return 0;
  } catch (const std::exception& e) {
    return xp::tools::report_error(e);
  }
}
