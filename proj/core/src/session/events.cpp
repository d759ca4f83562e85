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

#include "xp/session/events.hpp"

#include <charconv>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "xp/error.hpp"

namespace xp::session {

using nlohmann::json;

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date, and back.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

int digits(std::string_view text, std::size_t pos, std::size_t len) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
  if (ec != std::errc() || ptr != text.data() + pos + len) {
    throw Error(ErrorCode::kSchemaError, "malformed timestamp '" + std::string(text) + "'");
  }
  return v;
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kSchemaError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kSchemaError, std::string("field '") + key + "' has the wrong type");
  }
}

const char* const kEventFields[] = {"session_id", "seq", "wall_time", "elapsed_ms",
                                    "agent", "move", "topic", "artifact_ref"};

}  // namespace

std::string_view to_string(SessionAction action) {
  switch (action) {
    case SessionAction::kSelectPersona: return "select_persona";
    case SessionAction::kPresentTarget: return "present_target";
    case SessionAction::kEndDialogue: return "end_dialogue";
    case SessionAction::kOpenQuestionnaire: return "open_questionnaire";
    case SessionAction::kAnswerQuestionnaire: return "answer_questionnaire";
    case SessionAction::kSubmitFreeText: return "submit_free_text";
  }
  return "?";
}

std::optional<SessionAction> parse_session_action(std::string_view text) {
  for (auto a : {SessionAction::kSelectPersona, SessionAction::kPresentTarget, SessionAction::kEndDialogue,
                 SessionAction::kOpenQuestionnaire, SessionAction::kAnswerQuestionnaire,
                 SessionAction::kSubmitFreeText}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

std::string to_string(const EventMove& move) {
  if (const auto* m = std::get_if<protocol::Move>(&move)) return protocol::to_string(*m);
  return std::string(to_string(std::get<SessionAction>(move)));
}

std::string format_utc_ms(std::int64_t ms) {
  std::int64_t days = ms / 86400000;
  std::int64_t rem = ms % 86400000;
  if (rem < 0) {
    rem += 86400000;
    --days;
  }
  std::int64_t y;
  unsigned mo, d;
  civil_from_days(days, y, mo, d);
  const auto h = static_cast<int>(rem / 3600000);
  const auto mi = static_cast<int>(rem / 60000 % 60);
  const auto s = static_cast<int>(rem / 1000 % 60);
  const auto milli = static_cast<int>(rem % 1000);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<long long>(y), mo, d, h,
                mi, s, milli);
  return buf;
}

std::int64_t parse_utc_ms(std::string_view t) {
  if (t.size() != 24 || t[4] != '-' || t[7] != '-' || t[10] != 'T' || t[13] != ':' || t[16] != ':' ||
      t[19] != '.' || t[23] != 'Z') {
    throw Error(ErrorCode::kSchemaError, "malformed timestamp '" + std::string(t) + "'");
  }
  const int y = digits(t, 0, 4), mo = digits(t, 5, 2), d = digits(t, 8, 2);
  const int h = digits(t, 11, 2), mi = digits(t, 14, 2), s = digits(t, 17, 2), ms = digits(t, 20, 3);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
    throw Error(ErrorCode::kSchemaError, "timestamp out of range '" + std::string(t) + "'");
  }
  const std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  return ((days * 24 + h) * 60 + mi) * 60000 + static_cast<std::int64_t>(s) * 1000 + ms;
}

json to_json(const InteractionEvent& e) {
  json j;
  j["session_id"] = e.session_id;
  j["seq"] = e.seq;
  j["wall_time"] = format_utc_ms(e.wall_time_ms);
  j["elapsed_ms"] = e.elapsed_ms;
  j["agent"] = std::string(protocol::to_string(e.agent));
  if (const auto* m = std::get_if<protocol::Move>(&e.move)) {
    j["move"] = protocol::to_json(*m);
  } else {
    j["move"] = {{"type", std::string(to_string(std::get<SessionAction>(e.move)))}};
  }
  j["topic"] = protocol::to_json(e.topic);
  j["artifact_ref"] = e.artifact_ref ? json(*e.artifact_ref) : json(nullptr);
  return j;
}

InteractionEvent event_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "event must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* f : kEventFields) known = known || key == f;
    if (!known) throw Error(ErrorCode::kSchemaError, "unknown event field '" + key + "'");
  }
  InteractionEvent e;
  e.session_id = required<std::string>(j, "session_id");
  e.seq = required<std::uint64_t>(j, "seq");
  e.wall_time_ms = parse_utc_ms(required<std::string>(j, "wall_time"));
  e.elapsed_ms = required<std::int64_t>(j, "elapsed_ms");
  if (e.elapsed_ms < 0) throw Error(ErrorCode::kSchemaError, "elapsed_ms must not be negative");
  auto agent = protocol::parse_agent(required<std::string>(j, "agent"));
  if (!agent) throw Error(ErrorCode::kSchemaError, "unknown agent");
  e.agent = *agent;
  const json move = required<json>(j, "move");
  const std::string type = move.is_object() ? move.value("type", std::string{}) : std::string{};
  if (auto action = parse_session_action(type)) {
    e.move = *action;
  } else {
    e.move = protocol::move_from_json(move);
  }
  e.topic = protocol::topic_from_json(required<json>(j, "topic"));
  if (j.contains("artifact_ref") && !j["artifact_ref"].is_null()) e.artifact_ref = j["artifact_ref"].get<std::string>();
  return e;
}

std::string to_jsonl_line(const InteractionEvent& event) { return to_json(event).dump(); }

std::string_view to_string(Group group) { return group == Group::kA ? "A" : "B"; }

std::optional<Group> parse_group(std::string_view text) {
  if (text == "A" || text == "a") return Group::kA;
  if (text == "B" || text == "b") return Group::kB;
  return std::nullopt;
}

const QuestionnaireSpec& satisfaction_scale() {
  static const QuestionnaireSpec spec{
      {
          {"ess_understand", "From the explanations, I understand how the system reached its decision."},
          {"ess_satisfying", "The explanations of the decision are satisfying."},
          {"ess_detail", "The explanations have enough detail."},
          {"ess_complete", "The explanations seem complete."},
          {"ess_useful", "The explanations are useful for what I wanted to find out."},
          {"ess_trust", "The explanations help me judge how far to trust the system."},
      },
      5};
  return spec;
}

std::string evaluation_item_id(std::string_view question_id) { return "eval:" + std::string(question_id); }

bool is_evaluation_item(std::string_view item_id) { return item_id.substr(0, 5) == "eval:"; }

json record_header_json(const SessionRecord& r) {
  json j;
  j["session_id"] = r.session_id;
  j["participant_id"] = r.participant_id;
  j["group"] = std::string(to_string(r.group));
  j["persona"] = r.persona;
  j["started_at"] = format_utc_ms(r.started_at_ms);
  j["event_count"] = r.events.size();
  if (r.questionnaire) {
    json q = json::array();
    for (const auto& resp : *r.questionnaire) q.push_back({{"item", resp.item}, {"value", resp.value}});
    j["questionnaire"] = std::move(q);
  } else {
    j["questionnaire"] = nullptr;
  }
  j["free_text"] = r.free_text ? json(*r.free_text) : json(nullptr);
  j["finalized_at"] = r.finalized_at_ms ? json(format_utc_ms(*r.finalized_at_ms)) : json(nullptr);
  return j;
}

SessionRecord record_from_header_json(const json& j) {
  SessionRecord r;
  r.session_id = required<std::string>(j, "session_id");
  r.participant_id = required<std::string>(j, "participant_id");
  auto group = parse_group(required<std::string>(j, "group"));
  if (!group) throw Error(ErrorCode::kSchemaError, "unknown group");
  r.group = *group;
  r.persona = j.value("persona", std::string{});
  r.started_at_ms = parse_utc_ms(required<std::string>(j, "started_at"));
  if (j.contains("questionnaire") && !j["questionnaire"].is_null()) {
    std::vector<LikertResponse> q;
    for (const auto& resp : j["questionnaire"]) {
      q.push_back({required<std::string>(resp, "item"), required<int>(resp, "value")});
    }
    r.questionnaire = std::move(q);
  }
  if (j.contains("free_text") && !j["free_text"].is_null()) r.free_text = j["free_text"].get<std::string>();
  if (j.contains("finalized_at") && !j["finalized_at"].is_null()) {
    r.finalized_at_ms = parse_utc_ms(j["finalized_at"].get<std::string>());
  }
  return r;
}

protocol::DialogueState replay_events(std::shared_ptr<const iff::IffGraph> graph, std::string_view persona,
                                      bool followups_enabled, std::string session_id,
                                      const std::vector<InteractionEvent>& events) {
  protocol::DialogueState state =
      protocol::new_session(std::move(graph), persona, followups_enabled, std::move(session_id));
  for (const auto& e : events) {
    if (const auto* m = std::get_if<protocol::Move>(&e.move)) {
      state = protocol::apply_move(state, e.agent, *m);
    } else if (std::get<SessionAction>(e.move) == SessionAction::kEndDialogue) {
      state = protocol::end_dialogue(state);
    }
  }
  return state;
}

}  // namespace xp::session
