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

// Conversation log records. One InteractionEvent per atomic interaction;
// the JSONL log holds one event per line with exactly the fields
// session_id, seq, wall_time, elapsed_ms, agent, move, topic, artifact_ref.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xp/iff/types.hpp"
#include "xp/protocol/eedm.hpp"
#include "xp/protocol/moves.hpp"

namespace xp::session {

// Steps of a session that are not protocol moves. They share the log's
// `move` field, tagged by their own type names.
enum class SessionAction {
  kSelectPersona,
  kPresentTarget,
  kEndDialogue,
  kOpenQuestionnaire,
  kAnswerQuestionnaire,
  kSubmitFreeText,
};
std::string_view to_string(SessionAction action);
std::optional<SessionAction> parse_session_action(std::string_view text);

using EventMove = std::variant<protocol::Move, SessionAction>;
std::string to_string(const EventMove& move);

struct InteractionEvent {
  std::string session_id;
  std::uint64_t seq = 0;
  std::int64_t wall_time_ms = 0;  // UTC, milliseconds since the epoch
  std::int64_t elapsed_ms = 0;    // since the previous event of the session
  protocol::AgentRole agent = protocol::AgentRole::kQuestioner;
  EventMove move;
  protocol::Topic topic;
  std::optional<std::string> artifact_ref;

  bool operator==(const InteractionEvent&) const = default;
};

// "2026-10-15T08:30:00.125Z"
std::string format_utc_ms(std::int64_t ms);
// Throws kSchemaError.
std::int64_t parse_utc_ms(std::string_view text);

nlohmann::json to_json(const InteractionEvent& event);
// Throws kSchemaError on unknown or missing fields.
InteractionEvent event_from_json(const nlohmann::json& j);
std::string to_jsonl_line(const InteractionEvent& event);  // no trailing newline

enum class Group { kA, kB };
std::string_view to_string(Group group);  // "A" / "B"
std::optional<Group> parse_group(std::string_view text);  // accepts either case
inline bool followups_enabled(Group group) { return group == Group::kB; }

struct QuestionnaireItem {
  std::string id;
  std::string text;
};

struct QuestionnaireSpec {
  std::vector<QuestionnaireItem> items;
  int scale = 5;
};

// The six satisfaction items every session answers.
const QuestionnaireSpec& satisfaction_scale();

// Item added for each explored question.
std::string evaluation_item_id(std::string_view question_id);
bool is_evaluation_item(std::string_view item_id);

struct LikertResponse {
  std::string item;
  int value = 0;

  bool operator==(const LikertResponse&) const = default;
};

struct SessionRecord {
  std::string session_id;
  std::string participant_id;
  Group group = Group::kA;
  std::string persona;
  std::int64_t started_at_ms = 0;
  std::vector<InteractionEvent> events;
  std::optional<std::vector<LikertResponse>> questionnaire;
  std::optional<std::string> free_text;
  std::optional<std::int64_t> finalized_at_ms;

  bool operator==(const SessionRecord&) const = default;
};

// Record without its events, as stored next to the event log.
nlohmann::json record_header_json(const SessionRecord& record);
SessionRecord record_from_header_json(const nlohmann::json& j);

// Rebuilds the dialogue state by folding the logged protocol moves (and the
// end of the dialogue) over a fresh session.
protocol::DialogueState replay_events(std::shared_ptr<const iff::IffGraph> graph,
                                      std::string_view persona, bool followups_enabled,
                                      std::string session_id,
                                      const std::vector<InteractionEvent>& events);

}  // namespace xp::session
