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

// Transport-independent conversation service: one dialogue manager per
// session, events stamped and persisted as they are produced. Messages of
// one session are handled one at a time; different sessions proceed in
// parallel.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xp/bt/dialogue_manager.hpp"
#include "xp/rng.hpp"
#include "xp/session/events.hpp"
#include "xp/session/store.hpp"

namespace xp::session {

enum class GroupMode { kA, kB, kRandom };
std::optional<GroupMode> parse_group_mode(std::string_view text);  // "a", "b", "random"

struct Assignment {
  std::optional<Group> forced;  // empty: the service's seeded coin

  static Assignment random() { return {}; }
  static Assignment force(Group group) { return {group}; }
};

using Clock = std::function<std::int64_t()>;
std::int64_t system_clock_ms();

struct ServiceConfig {
  std::shared_ptr<const iff::IffGraph> graph;
  std::shared_ptr<const explain::ExplainerContext> explainer;
  // User group used when the client does not pick one. Empty means the only
  // persona of the graph, or a persona menu when there are several.
  std::string default_persona;
  // kA and kB override random assignments.
  GroupMode group_mode = GroupMode::kRandom;
  std::uint64_t seed = 0;
  int estimated_minutes = 15;  // reported to analytics only
  bt::TargetMode target_mode = bt::TargetMode::kRandomTestSample;
  std::size_t target_row = 0;
  Clock clock;  // defaults to system_clock_ms
};

struct StartedSession {
  std::string session_id;
  std::string token;
  Group group = Group::kA;
  // Server envelopes of the bootstrap tick; the first payload carries
  // "session": {session_id, token, group, proto_version}.
  std::vector<nlohmann::json> messages;
};

class SessionService {
 public:
  // Throws kInvalidGraph when the graph does not validate.
  SessionService(ServiceConfig config, std::shared_ptr<SessionStore> store);
  ~SessionService();

  // Throws kSchemaError for an empty participant id and
  // kDuplicateActiveSession while the participant has an unfinished session.
  StartedSession start_session(const std::string& participant_id, Assignment assignment = Assignment::random());

  // One client envelope in, server envelopes out. Throws kUnknownSession and
  // kSchemaError; neither logs an event. Dialogue-level mistakes come back as
  // protocol_error messages instead.
  std::vector<nlohmann::json> handle_client_message(const std::string& session_id, std::string_view message);
  std::vector<nlohmann::json> handle_client_message(const std::string& session_id, const nlohmann::json& message);
  std::vector<nlohmann::json> handle_client_message(const std::string& session_id, const std::string& message) {
    return handle_client_message(session_id, std::string_view(message));
  }

  // Answers the questionnaire and submits the free text in one call.
  // Throws kUnknownSession, kSessionNotEnded, kIncompleteQuestionnaire and
  // kSchemaError (value outside the scale, unknown or repeated item).
  SessionRecord finalize_session(const std::string& session_id, const std::vector<LikertResponse>& responses,
                                 const std::string& free_text);

  bool authorize(const std::string& session_id, const std::string& token) const;
  bool is_complete(const std::string& session_id) const;
  SessionRecord record(const std::string& session_id) const;
  protocol::DialogueState dialogue_state(const std::string& session_id) const;
  std::vector<QuestionnaireItem> questionnaire_items(const std::string& session_id) const;
  std::size_t active_session_count() const;

  const ServiceConfig& config() const { return config_; }
  SessionStore& store() { return *store_; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& session_id) const;
  std::vector<nlohmann::json> run_step(Session& s, std::optional<bt::UserInput> input);
  void finish(Session& s, std::int64_t now);

  ServiceConfig config_;
  std::shared_ptr<SessionStore> store_;
  mutable std::mutex mutex_;  // guards the maps, counters and rng_
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::string> active_by_participant_;
  std::uint64_t next_session_ = 1;
  Rng rng_;
  Rng token_rng_;
};

}  // namespace xp::session
