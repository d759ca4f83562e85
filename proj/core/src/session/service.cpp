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

#include "xp/session/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>

#include "xp/error.hpp"
#include "xp/session/wire.hpp"

namespace xp::session {

using nlohmann::json;

struct SessionService::Session {
  std::mutex mutex;
  SessionRecord record;
  std::string token;
  std::unique_ptr<bt::DialogueManager> manager;
  std::set<std::string> persisted_artifacts;
  bool complete = false;
};

namespace {

std::string session_name(std::uint64_t n) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(n));
  return buf;
}

std::string hex_token(Rng& rng) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng.next_u64()),
                static_cast<unsigned long long>(rng.next_u64()));
  return buf;
}

}  // namespace

std::optional<GroupMode> parse_group_mode(std::string_view text) {
  if (text == "a" || text == "A") return GroupMode::kA;
  if (text == "b" || text == "B") return GroupMode::kB;
  if (text == "random") return GroupMode::kRandom;
  return std::nullopt;
}

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

SessionService::SessionService(ServiceConfig config, std::shared_ptr<SessionStore> store)
    : config_(std::move(config)),
      store_(std::move(store)),
      rng_(mix_seed(config_.seed, 0x67726f7570)),
      token_rng_(std::random_device{}()) {
  if (!config_.graph || !config_.explainer || !store_) {
    throw Error(ErrorCode::kSchemaError, "service needs a graph, an explainer and a store");
  }
  if (!iff::validate_iff(*config_.graph).ok) throw Error(ErrorCode::kInvalidGraph, "graph fails validation");
  if (!config_.clock) config_.clock = system_clock_ms;
  if (config_.default_persona.empty() && config_.graph->persona_filters.size() == 1) {
    config_.default_persona = config_.graph->persona_filters.begin()->first;
  }
  if (!config_.default_persona.empty() && !config_.graph->persona_filters.contains(config_.default_persona)) {
    throw Error(ErrorCode::kUnknownUserGroup, "unknown persona '" + config_.default_persona + "'");
  }
  // Continue numbering after sessions already in the store.
  next_session_ = store_->session_ids().size() + 1;
}

SessionService::~SessionService() = default;

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  return it->second;
}

StartedSession SessionService::start_session(const std::string& participant_id, Assignment assignment) {
  if (participant_id.empty()) throw Error(ErrorCode::kSchemaError, "participant id must not be empty");
  auto s = std::make_shared<Session>();
  std::uint64_t number = 0;
  {
    std::lock_guard lock(mutex_);
    if (active_by_participant_.contains(participant_id)) {
      throw Error(ErrorCode::kDuplicateActiveSession,
                  "participant '" + participant_id + "' already has session " + active_by_participant_[participant_id]);
    }
    Group group;
    if (assignment.forced) {
      group = *assignment.forced;
    } else if (config_.group_mode == GroupMode::kA) {
      group = Group::kA;
    } else if (config_.group_mode == GroupMode::kB) {
      group = Group::kB;
    } else {
      group = rng_.coin() ? Group::kB : Group::kA;
    }
    do {
      number = next_session_++;
    } while (sessions_.contains(session_name(number)));
    s->record.session_id = session_name(number);
    s->record.participant_id = participant_id;
    s->record.group = group;
    s->token = hex_token(token_rng_);
    sessions_.emplace(s->record.session_id, s);
    active_by_participant_.emplace(participant_id, s->record.session_id);
  }

  std::lock_guard session_lock(s->mutex);
  try {
    bt::ManagerConfig mc;
    mc.followups_enabled = followups_enabled(s->record.group);
    mc.persona = config_.default_persona;
    mc.target_mode = config_.target_mode;
    mc.target_row = config_.target_row;
    mc.seed = mix_seed(config_.seed, number);
    s->manager = std::make_unique<bt::DialogueManager>(config_.graph, config_.explainer, mc, s->record.session_id);
    s->record.persona = config_.default_persona;
    s->record.started_at_ms = config_.clock();
    store_->create(s->record);
  } catch (...) {
    std::lock_guard lock(mutex_);
    sessions_.erase(s->record.session_id);
    active_by_participant_.erase(participant_id);
    throw;
  }

  StartedSession out;
  out.session_id = s->record.session_id;
  out.token = s->token;
  out.group = s->record.group;
  out.messages = run_step(*s, std::nullopt);
  if (!out.messages.empty()) {
    out.messages.front()["payload"]["session"] = {{"session_id", out.session_id},
                                                  {"token", out.token},
                                                  {"group", std::string(to_string(out.group))},
                                                  {"proto_version", kProtoVersion}};
  }
  return out;
}

std::vector<json> SessionService::run_step(Session& s, std::optional<bt::UserInput> input) {
  auto result = s.manager->step(std::move(input));
  const std::int64_t now = config_.clock();

  if (!result.events.empty()) {
    std::vector<InteractionEvent> events;
    for (auto& draft : result.events) {
      InteractionEvent e;
      e.session_id = s.record.session_id;
      e.seq = s.record.events.empty() ? 1 : s.record.events.back().seq + 1;
      e.wall_time_ms = now;
      e.elapsed_ms = s.record.events.empty() ? 0 : std::max<std::int64_t>(0, now - s.record.events.back().wall_time_ms);
      e.agent = draft.agent;
      e.move = std::move(draft.move);
      e.topic = std::move(draft.topic);
      e.artifact_ref = std::move(draft.artifact_ref);
      if (e.artifact_ref && !s.persisted_artifacts.contains(*e.artifact_ref)) {
        store_->append_artifact(e.session_id, s.manager->artifacts().at(*e.artifact_ref));
        s.persisted_artifacts.insert(*e.artifact_ref);
      }
      s.record.events.push_back(e);
      events.push_back(std::move(e));
    }
    store_->append_events(s.record.session_id, events);
  }
  if (s.manager->complete() && !s.complete) finish(s, now);

  std::vector<json> out;
  out.reserve(result.messages.size());
  for (const auto& m : result.messages) out.push_back(server_envelope(m));
  return out;
}

void SessionService::finish(Session& s, std::int64_t now) {
  const auto& bb = s.manager->blackboard();
  std::vector<LikertResponse> responses;
  if (const auto* given = bb.find<std::map<std::string, int>>("eval.responses")) {
    for (const auto& item : s.manager->questionnaire_items()) {
      auto it = given->find(item.id);
      if (it != given->end()) responses.push_back({item.id, it->second});
    }
  }
  s.record.questionnaire = std::move(responses);
  if (const auto* text = bb.find<std::string>("eval.free_text")) s.record.free_text = *text;
  s.record.finalized_at_ms = now;
  store_->finalize(s.record);
  s.complete = true;
  std::lock_guard lock(mutex_);
  active_by_participant_.erase(s.record.participant_id);
}

std::vector<json> SessionService::handle_client_message(const std::string& session_id, std::string_view message) {
  find(session_id);
  json parsed = json::parse(message, nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::kSchemaError, "message is not valid JSON");
  return handle_client_message(session_id, parsed);
}

std::vector<json> SessionService::handle_client_message(const std::string& session_id, const json& message) {
  auto s = find(session_id);
  const ClientMessage parsed = parse_client_message(message);
  std::lock_guard lock(s->mutex);
  if (parsed.type == "start") {
    return {server_envelope({"protocol_error",
                             {{"code", "already_started"},
                              {"message", "this connection already has a session"},
                              {"phase", std::string(protocol::to_string(s->manager->state()->phase))},
                              {"expected", json::array()},
                              {"options", json::array()}}})};
  }
  return run_step(*s, to_user_input(parsed));
}

SessionRecord SessionService::finalize_session(const std::string& session_id,
                                               const std::vector<LikertResponse>& responses,
                                               const std::string& free_text) {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  if (s->complete) return s->record;
  const auto* st = s->manager->state();
  if (!st || st->phase != protocol::Phase::kEnded) {
    throw Error(ErrorCode::kSessionNotEnded, "session '" + session_id + "' has not ended its dialogue");
  }
  const auto items = s->manager->questionnaire_items();
  const int scale = satisfaction_scale().scale;
  bt::UserInput answers;
  answers.kind = bt::InputKind::kQuestionnaire;
  for (const auto& r : responses) {
    const bool known = std::any_of(items.begin(), items.end(), [&](const auto& it) { return it.id == r.item; });
    if (!known) throw Error(ErrorCode::kSchemaError, "unknown questionnaire item '" + r.item + "'");
    if (r.value < 1 || r.value > scale) {
      throw Error(ErrorCode::kSchemaError,
                  "response " + std::to_string(r.value) + " to '" + r.item + "' is outside 1.." + std::to_string(scale));
    }
    if (!answers.responses.emplace(r.item, r.value).second) {
      throw Error(ErrorCode::kSchemaError, "item '" + r.item + "' answered twice");
    }
  }
  for (const auto& item : items) {
    if (!answers.responses.contains(item.id)) {
      throw Error(ErrorCode::kIncompleteQuestionnaire,
                  std::to_string(answers.responses.size()) + " of " + std::to_string(items.size()) +
                      " items answered; missing '" + item.id + "'");
    }
  }
  run_step(*s, std::move(answers));
  bt::UserInput text;
  text.kind = bt::InputKind::kFreeText;
  text.text = free_text;
  run_step(*s, std::move(text));
  if (!s->complete) throw Error(ErrorCode::kHandlerError, "session did not complete after the questionnaire");
  return s->record;
}

bool SessionService::authorize(const std::string& session_id, const std::string& token) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  return it != sessions_.end() && !token.empty() && it->second->token == token;
}

bool SessionService::is_complete(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  return s->complete;
}

SessionRecord SessionService::record(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  return s->record;
}

protocol::DialogueState SessionService::dialogue_state(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  const auto* st = s->manager->state();
  if (!st) throw Error(ErrorCode::kSessionNotEnded, "session '" + session_id + "' has not chosen a persona yet");
  return *st;
}

std::vector<QuestionnaireItem> SessionService::questionnaire_items(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mutex);
  return s->manager->questionnaire_items();
}

std::size_t SessionService::active_session_count() const {
  std::lock_guard lock(mutex_);
  return active_by_participant_.size();
}

}  // namespace xp::session
