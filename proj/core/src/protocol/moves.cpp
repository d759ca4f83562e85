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

#include "xp/protocol/moves.hpp"

#include <nlohmann/json.hpp>

#include "xp/error.hpp"

namespace xp::protocol {

using nlohmann::json;

std::string_view to_string(AgentRole agent) {
  return agent == AgentRole::kQuestioner ? "questioner" : "explainer";
}

std::optional<AgentRole> parse_agent(std::string_view text) {
  if (text == "questioner") return AgentRole::kQuestioner;
  if (text == "explainer") return AgentRole::kExplainer;
  return std::nullopt;
}

bool is_control(MoveKind kind) {
  switch (kind) {
    case MoveKind::kBeginQuestion:
    case MoveKind::kBeginExplanation:
    case MoveKind::kBeginArgument:
    case MoveKind::kEndExplanation:
    case MoveKind::kEndArgument:
    case MoveKind::kFollowup:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::kBeginQuestion: return "begin_question";
    case MoveKind::kBeginExplanation: return "begin_explanation";
    case MoveKind::kBeginArgument: return "begin_argument";
    case MoveKind::kEndExplanation: return "end_explanation";
    case MoveKind::kEndArgument: return "end_argument";
    case MoveKind::kFollowup: return "followup";
    case MoveKind::kExplain: return "explain";
    case MoveKind::kAffirmComplement: return "affirm_complement";
    case MoveKind::kAffirmReplacement: return "affirm_replacement";
    case MoveKind::kAffirmValidation: return "affirm_validation";
    case MoveKind::kReturnQuestion: return "return_question";
    case MoveKind::kChallenge: return "challenge";
  }
  return "?";
}

std::optional<MoveKind> parse_move_kind(std::string_view text) {
  for (int i = 0; i < kMoveKindCount; ++i) {
    auto kind = static_cast<MoveKind>(i);
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

MoveKind affirm_kind_for(iff::FollowupKind kind) {
  switch (kind) {
    case iff::FollowupKind::kComplement: return MoveKind::kAffirmComplement;
    case iff::FollowupKind::kReplacement: return MoveKind::kAffirmReplacement;
    case iff::FollowupKind::kValidation: return MoveKind::kAffirmValidation;
  }
  return MoveKind::kAffirmComplement;
}

Move Move::begin_question(std::string question_id) {
  Move m;
  m.kind = MoveKind::kBeginQuestion;
  m.question_id = std::move(question_id);
  return m;
}

Move Move::begin_explanation() {
  Move m;
  m.kind = MoveKind::kBeginExplanation;
  return m;
}

Move Move::begin_argument() {
  Move m;
  m.kind = MoveKind::kBeginArgument;
  return m;
}

Move Move::end_explanation() {
  Move m;
  m.kind = MoveKind::kEndExplanation;
  return m;
}

Move Move::end_argument() {
  Move m;
  m.kind = MoveKind::kEndArgument;
  return m;
}

Move Move::followup_on(iff::FollowupKind kind) {
  Move m;
  m.kind = MoveKind::kFollowup;
  m.followup = kind;
  return m;
}

Move Move::explain(std::string type_id) {
  Move m;
  m.kind = MoveKind::kExplain;
  m.type_id = std::move(type_id);
  return m;
}

Move Move::affirm(iff::FollowupKind kind) {
  Move m;
  m.kind = affirm_kind_for(kind);
  return m;
}

Move Move::return_question(std::string question_id) {
  Move m;
  m.kind = MoveKind::kReturnQuestion;
  m.question_id = std::move(question_id);
  return m;
}

Move Move::challenge(std::string text) {
  Move m;
  m.kind = MoveKind::kChallenge;
  m.text = std::move(text);
  return m;
}

std::string to_string(const Move& move) {
  std::string name(to_string(move.kind));
  switch (move.kind) {
    case MoveKind::kBeginQuestion:
    case MoveKind::kReturnQuestion:
      return name + "(" + move.question_id + ")";
    case MoveKind::kExplain:
      return name + "(" + move.type_id + ")";
    case MoveKind::kFollowup:
      return name + "(" + std::string(iff::to_string(move.followup)) + ")";
    case MoveKind::kChallenge:
      return name + "(\"" + move.text + "\")";
    default:
      return name;
  }
}

Topic Topic::explanation_target() { return Topic{}; }

Topic Topic::intent_topic(iff::Intent intent, std::string question_id) {
  Topic t;
  t.kind = TopicKind::kIntent;
  t.intent = intent;
  t.question_id = std::move(question_id);
  return t;
}

Topic Topic::free(std::string text) {
  Topic t;
  t.kind = TopicKind::kFree;
  t.text = std::move(text);
  return t;
}

std::string to_string(const Topic& topic) {
  switch (topic.kind) {
    case TopicKind::kExplanationTarget: return "explanation_target";
    case TopicKind::kIntent:
      return std::string(iff::to_string(topic.intent)) + ":" + topic.question_id;
    case TopicKind::kFree: return "free:" + topic.text;
  }
  return "?";
}

json to_json(const Move& move) {
  json j;
  j["type"] = std::string(to_string(move.kind));
  switch (move.kind) {
    case MoveKind::kBeginQuestion:
    case MoveKind::kReturnQuestion:
      j["question"] = move.question_id;
      break;
    case MoveKind::kExplain:
      j["explanation_type"] = move.type_id;
      break;
    case MoveKind::kFollowup:
      j["kind"] = std::string(iff::to_string(move.followup));
      break;
    case MoveKind::kChallenge:
      j["text"] = move.text;
      break;
    default:
      break;
  }
  return j;
}

Move move_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw Error(ErrorCode::kSchemaError, "move must be an object with a string 'type'");
  }
  auto kind = parse_move_kind(j["type"].get<std::string>());
  if (!kind) throw Error(ErrorCode::kSchemaError, "unknown move type " + j["type"].dump());
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw Error(ErrorCode::kSchemaError, std::string("move is missing string field '") + key + "'");
    }
    return j[key].get<std::string>();
  };
  switch (*kind) {
    case MoveKind::kBeginQuestion: return Move::begin_question(str("question"));
    case MoveKind::kReturnQuestion: return Move::return_question(str("question"));
    case MoveKind::kExplain: return Move::explain(str("explanation_type"));
    case MoveKind::kChallenge: return Move::challenge(str("text"));
    case MoveKind::kFollowup: {
      auto fk = iff::parse_followup_kind(str("kind"));
      if (!fk) throw Error(ErrorCode::kSchemaError, "unknown followup kind");
      return Move::followup_on(*fk);
    }
    default: {
      Move m;
      m.kind = *kind;
      return m;
    }
  }
}

json to_json(const Topic& topic) {
  switch (topic.kind) {
    case TopicKind::kExplanationTarget:
      return json{{"type", "explanation_target"}};
    case TopicKind::kIntent:
      return json{{"type", "intent"},
                  {"intent", std::string(iff::to_string(topic.intent))},
                  {"question", topic.question_id}};
    case TopicKind::kFree:
      return json{{"type", "free"}, {"text", topic.text}};
  }
  return json{};
}

Topic topic_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw Error(ErrorCode::kSchemaError, "topic must be an object with a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "explanation_target") return Topic::explanation_target();
  if (type == "free") return Topic::free(j.value("text", std::string{}));
  if (type == "intent") {
    auto intent = iff::parse_intent(j.value("intent", std::string{}));
    if (!intent) throw Error(ErrorCode::kSchemaError, "topic has unknown intent");
    return Topic::intent_topic(*intent, j.value("question", std::string{}));
  }
  throw Error(ErrorCode::kSchemaError, "unknown topic type '" + type + "'");
}

}  // namespace xp::protocol
