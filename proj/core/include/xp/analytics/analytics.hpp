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

// Post-hoc analyses over session records. Every function here is a pure
// function of its input records.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xp/session/events.hpp"

namespace xp::analytics {

using session::SessionRecord;

// ---- time filter ---------------------------------------------------------------

enum class Verdict { kAccept, kRejectTooFast, kRejectInactive };
std::string_view to_string(Verdict verdict);  // accept, reject_too_fast, reject_inactive

struct TimeFlag {
  std::string session_id;
  Verdict verdict = Verdict::kAccept;
  std::int64_t total_ms = 0;
  double total_minutes = 0.0;
};

// Session time from the first event to the last one, leaving out the free
// text writing: when the record has a submit_free_text event the clock stops
// at the event before it.
std::int64_t session_total_ms(const SessionRecord& record);

// Too fast when total <= 0.3 x estimate, inactive when total >= 4 x
// estimate. Compared in integer milliseconds, so boundaries are exact for
// estimates given in whole milliseconds.
Verdict classify(std::int64_t total_ms, double estimated_minutes);

// Throws kSchemaError when estimated_minutes <= 0.
std::vector<TimeFlag> flag_sessions(const std::vector<SessionRecord>& records, double estimated_minutes);

// ---- pathways ----------------------------------------------------------------

enum class LabelKind { kPersona, kTarget, kIntentTopic, kExplanationType, kFollowup, kEvaluation };

struct SegmentLabel {
  LabelKind kind = LabelKind::kPersona;
  iff::Intent intent = iff::Intent::kTransparency;       // kIntentTopic
  std::string type_id;                                   // kExplanationType
  iff::FollowupKind followup = iff::FollowupKind::kComplement;  // kFollowup

  bool operator==(const SegmentLabel&) const = default;
};

// "persona", "target", "intent:transparency", "explanation:counterfactual",
// "followup:validation", "evaluation".
std::string to_string(const SegmentLabel& label);

struct PathwaySegment {
  std::string session_id;
  std::size_t order = 0;
  SegmentLabel label;
  std::int64_t duration_ms = 0;
  double fraction = 0.0;

  bool operator==(const PathwaySegment&) const = default;
};

struct PathwayOptions {
  // Fold followup episodes into the explanation segment they follow up on.
  bool merge_followups = true;
};

// An event lasts until the next event of the session; the last one lasts 0.
// Contiguous events with equal labels form one segment. Fractions are
// duration over session time; a session whose events share one timestamp
// gets equal fractions. Throws kEmptySession.
std::vector<PathwaySegment> pathway(const SessionRecord& record, PathwayOptions options = {});

// Label of every event, before merging into segments.
std::vector<SegmentLabel> event_labels(const SessionRecord& record, PathwayOptions options = {});

// ---- intent coverage -----------------------------------------------------------

struct IntentCoverage {
  std::size_t sessions = 0;
  std::map<std::string, std::size_t> sessions_per_intent;  // keyed by intent name
  std::map<std::size_t, std::size_t> intents_per_session;  // number of intents -> sessions
  std::size_t min_intents = 0;                              // 0 for an empty cohort
};

IntentCoverage intent_coverage(const std::vector<SessionRecord>& records);

// ---- questionnaire diff --------------------------------------------------------

using LevelCounts = std::array<int, 5>;  // index 0 is level 1

struct LikertDiff {
  std::vector<std::string> items;  // satisfaction scale order
  std::size_t sessions_a = 0;
  std::size_t sessions_b = 0;
  std::map<std::string, LevelCounts> counts_a;
  std::map<std::string, LevelCounts> counts_b;
  std::map<std::string, LevelCounts> diff;  // count_B - count_A
};

// Compares the satisfaction items. Throws kSpecMismatch when a record lacks
// a questionnaire, misses an item or holds a value outside 1..5.
LikertDiff likert_diff(const std::vector<SessionRecord>& a, const std::vector<SessionRecord>& b);

// ---- export --------------------------------------------------------------------

std::string flags_csv(const std::vector<TimeFlag>& flags);
nlohmann::json flags_json(const std::vector<TimeFlag>& flags);
std::string pathways_csv(const std::vector<PathwaySegment>& segments);
nlohmann::json pathways_json(const std::vector<PathwaySegment>& segments);
std::string coverage_csv(const IntentCoverage& coverage);
nlohmann::json coverage_json(const IntentCoverage& coverage);
// One row per item, columns level_1..level_5 of the diff.
std::string likert_csv(const LikertDiff& diff);
nlohmann::json likert_json(const LikertDiff& diff);

// Throws kIoError.
void write_text(const std::filesystem::path& path, std::string_view content);

// ---- rendering -------------------------------------------------------------------

struct RenderOptions {
  int row_width = 800;
  int row_height = 18;
  int row_gap = 6;
  int label_width = 120;
};

// One horizontal bar per session in first-appearance order. Segment edges
// are rounded from cumulative fractions, so each bar is exactly row_width
// pixels wide. Output bytes depend only on the input.
std::string render_pathways_svg(const std::vector<PathwaySegment>& segments, RenderOptions options = {});

// CSS class of a label kind, e.g. "seg-explanation".
std::string_view css_class(LabelKind kind);

}  // namespace xp::analytics
