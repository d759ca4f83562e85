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

// JSON messages exchanged with the chat client. Every message in either
// direction is an envelope {"proto_version", "type", "payload"}; clients may
// omit proto_version, but a present one must match kProtoVersion.
//
// The machine-readable schema is data/protocol/wire.schema.json and is
// identical to wire_schema().

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xp/bt/dialogue_manager.hpp"

namespace xp::session {

inline constexpr int kProtoVersion = 1;

// start, persona, choose_question, choose_followup, end_explanation,
// begin_argument, argue, questionnaire, free_text
const std::vector<std::string>& client_message_types();
// menu, explanation, annotation, followup_menu, questionnaire,
// protocol_error, bye
const std::vector<std::string>& server_message_types();

struct ClientMessage {
  std::string type;
  nlohmann::json payload = nlohmann::json::object();
};

// Throws kSchemaError for malformed JSON, unknown types, unknown or missing
// payload fields and version mismatches.
ClientMessage parse_client_message(std::string_view text);
ClientMessage parse_client_message(const nlohmann::json& message);
// Text, not a JSON string value.
inline ClientMessage parse_client_message(const std::string& text) {
  return parse_client_message(std::string_view(text));
}

// Dialogue input for every type except "start". Throws kSchemaError.
bt::UserInput to_user_input(const ClientMessage& message);

nlohmann::json client_envelope(std::string_view type, nlohmann::json payload = nlohmann::json::object());
nlohmann::json server_envelope(const bt::OutMessage& message);

const nlohmann::json& wire_schema();

}  // namespace xp::session
