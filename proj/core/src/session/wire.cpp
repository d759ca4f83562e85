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

#include "xp/session/wire.hpp"

#include <algorithm>
#include <set>

#include "xp/error.hpp"

namespace xp::session {

using nlohmann::json;

namespace {

// Generated from data/protocol/wire.schema.json at configure time.
constexpr std::string_view kSchemaText =
#include "wire_schema.inc"
    ;

[[noreturn]] void schema_error(const std::string& message) { throw Error(ErrorCode::kSchemaError, message); }

void allow_only(const json& payload, std::initializer_list<std::string_view> keys, std::string_view type) {
  for (const auto& [key, value] : payload.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      schema_error("unexpected field '" + key + "' in " + std::string(type) + " payload");
    }
  }
}

std::string string_field(const json& payload, const char* key, std::string_view type) {
  if (!payload.contains(key) || !payload.at(key).is_string()) {
    schema_error(std::string(type) + " payload needs a string '" + key + "'");
  }
  return payload.at(key).get<std::string>();
}

}  // namespace

const std::vector<std::string>& client_message_types() {
  static const std::vector<std::string> types = {"start",           "persona",        "choose_question",
                                                 "choose_followup", "end_explanation", "begin_argument",
                                                 "argue",           "questionnaire",  "free_text"};
  return types;
}

const std::vector<std::string>& server_message_types() {
  static const std::vector<std::string> types = {"menu",          "explanation",    "annotation", "followup_menu",
                                                 "questionnaire", "protocol_error", "bye"};
  return types;
}

ClientMessage parse_client_message(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) schema_error("message is not valid JSON");
  return parse_client_message(j);
}

ClientMessage parse_client_message(const json& j) {
  if (!j.is_object()) schema_error("message must be a JSON object");
  allow_only(j, {"proto_version", "type", "payload"}, "envelope");
  if (j.contains("proto_version")) {
    if (!j["proto_version"].is_number_integer() || j["proto_version"].get<int>() != kProtoVersion) {
      schema_error("unsupported proto_version " + j["proto_version"].dump() + "; server speaks " +
                   std::to_string(kProtoVersion));
    }
  }
  if (!j.contains("type") || !j["type"].is_string()) schema_error("message needs a string 'type'");
  ClientMessage msg;
  msg.type = j["type"].get<std::string>();
  const auto& types = client_message_types();
  if (std::find(types.begin(), types.end(), msg.type) == types.end()) {
    schema_error("unknown message type '" + msg.type + "'");
  }
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) schema_error("payload must be an object");
    msg.payload = j["payload"];
  }

  const auto& p = msg.payload;
  const std::string& t = msg.type;
  if (t == "start") {
    allow_only(p, {"participant"}, t);
    if (p.contains("participant") && (!p["participant"].is_string() || p["participant"].get<std::string>().empty())) {
      schema_error("participant must be a non-empty string");
    }
  } else if (t == "persona") {
    allow_only(p, {"group"}, t);
    string_field(p, "group", t);
  } else if (t == "choose_question") {
    allow_only(p, {"question"}, t);
    string_field(p, "question", t);
  } else if (t == "choose_followup") {
    allow_only(p, {"kind"}, t);
    if (!iff::parse_followup_kind(string_field(p, "kind", t))) schema_error("unknown followup kind");
  } else if (t == "end_explanation" || t == "begin_argument") {
    allow_only(p, {}, t);
  } else if (t == "argue" || t == "free_text") {
    allow_only(p, {"text"}, t);
    string_field(p, "text", t);
  } else if (t == "questionnaire") {
    allow_only(p, {"responses"}, t);
    if (p.contains("responses")) {
      if (!p["responses"].is_object()) schema_error("responses must be an object");
      for (const auto& [item, value] : p["responses"].items()) {
        if (!value.is_number_integer()) schema_error("response to '" + item + "' must be an integer");
        const auto v = value.get<long long>();
        if (v < 1 || v > 5) schema_error("response to '" + item + "' must lie in 1..5");
      }
    }
  }
  return msg;
}

bt::UserInput to_user_input(const ClientMessage& m) {
  bt::UserInput in;
  const auto& p = m.payload;
  if (m.type == "persona") {
    in.kind = bt::InputKind::kPersona;
    in.persona = p.at("group").get<std::string>();
  } else if (m.type == "choose_question") {
    in.kind = bt::InputKind::kChooseQuestion;
    in.question_id = p.at("question").get<std::string>();
  } else if (m.type == "choose_followup") {
    in.kind = bt::InputKind::kChooseFollowup;
    in.followup = *iff::parse_followup_kind(p.at("kind").get<std::string>());
  } else if (m.type == "end_explanation") {
    in.kind = bt::InputKind::kEndExplanation;
  } else if (m.type == "begin_argument") {
    in.kind = bt::InputKind::kBeginArgument;
  } else if (m.type == "argue") {
    in.kind = bt::InputKind::kArgue;
    in.text = p.at("text").get<std::string>();
  } else if (m.type == "questionnaire") {
    if (p.contains("responses")) {
      in.kind = bt::InputKind::kQuestionnaire;
      for (const auto& [item, value] : p["responses"].items()) in.responses[item] = value.get<int>();
    } else {
      in.kind = bt::InputKind::kOpenQuestionnaire;
    }
  } else if (m.type == "free_text") {
    in.kind = bt::InputKind::kFreeText;
    in.text = p.at("text").get<std::string>();
  } else {
    schema_error("'" + m.type + "' is not a dialogue input");
  }
  return in;
}

json client_envelope(std::string_view type, json payload) {
  return json{{"proto_version", kProtoVersion}, {"type", type}, {"payload", std::move(payload)}};
}

json server_envelope(const bt::OutMessage& message) {
  return json{{"proto_version", kProtoVersion}, {"type", message.type}, {"payload", message.payload}};
}

const json& wire_schema() {
  static const json schema = json::parse(kSchemaText);
  return schema;
}

}  // namespace xp::session
