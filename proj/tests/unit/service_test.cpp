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

#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "xp/error.hpp"
#include "xp/session/service.hpp"
#include "xp/session/wire.hpp"

namespace xp::session {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    store_ = std::make_shared<MemoryStore>();
    service_ = make_service(store_);
  }

  std::unique_ptr<SessionService> make_service(std::shared_ptr<SessionStore> store, std::uint64_t seed = 5) {
    ServiceConfig c;
    c.graph = testing::loan_graph();
    c.explainer = testing::loan_explainer();
    c.seed = seed;
    c.clock = [this] { return now_; };
    return std::make_unique<SessionService>(c, std::move(store));
  }

  std::vector<json> send(const std::string& id, const std::string& type, json payload = json::object()) {
    now_ += 1000;
    return service_->handle_client_message(id, client_envelope(type, std::move(payload)));
  }

  std::int64_t now_ = 1790000000000;
  std::shared_ptr<MemoryStore> store_;
  std::unique_ptr<SessionService> service_;
};

std::vector<std::string> types(const std::vector<json>& messages) {
  std::vector<std::string> out;
  for (const auto& m : messages) out.push_back(m["type"]);
  return out;
}

TEST_F(ServiceTest, StartCarriesSessionInfo) {
  const auto s = service_->start_session("p1", Assignment::force(Group::kB));
  EXPECT_EQ(s.group, Group::kB);
  ASSERT_EQ(types(s.messages), std::vector<std::string>{"menu"});
  const auto& info = s.messages[0]["payload"]["session"];
  EXPECT_EQ(info["session_id"], s.session_id);
  EXPECT_EQ(info["token"], s.token);
  EXPECT_EQ(info["group"], "B");
  EXPECT_EQ(info["proto_version"], kProtoVersion);
  EXPECT_TRUE(service_->authorize(s.session_id, s.token));
  EXPECT_FALSE(service_->authorize(s.session_id, "x"));
  EXPECT_EQ(store_->load(s.session_id).events.size(), 2u);
}

TEST_F(ServiceTest, OneActiveSessionPerParticipant) {
  service_->start_session("p1");
  try {
    service_->start_session("p1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateActiveSession);
  }
  EXPECT_NO_THROW(service_->start_session("p2"));
  EXPECT_EQ(service_->active_session_count(), 2u);
  EXPECT_THROW(service_->start_session(""), Error);
}

TEST_F(ServiceTest, RandomAssignmentIsSeeded) {
  auto other = make_service(std::make_shared<MemoryStore>());
  std::size_t b = 0;
  for (int i = 0; i < 20; ++i) {
    const auto p = "p" + std::to_string(i);
    const auto g1 = service_->start_session(p).group;
    EXPECT_EQ(other->start_session(p).group, g1);
    b += g1 == Group::kB;
  }
  EXPECT_GT(b, 0u);
  EXPECT_LT(b, 20u);
}

TEST_F(ServiceTest, ErrorsThatDoNotLog) {
  const auto s = service_->start_session("p1");
  const auto before = store_->load(s.session_id).events.size();
  EXPECT_THROW(service_->handle_client_message("nope", std::string(R"({"type":"end_explanation"})")), Error);
  try {
    service_->handle_client_message(s.session_id, std::string("{oops"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
  }
  const auto again = send(s.session_id, "start");
  ASSERT_EQ(types(again), std::vector<std::string>{"protocol_error"});
  EXPECT_EQ(again[0]["payload"]["code"], "already_started");
  const auto bad = send(s.session_id, "choose_question", {{"question", "nope"}});
  ASSERT_EQ(types(bad), std::vector<std::string>{"protocol_error"});
  EXPECT_EQ(store_->load(s.session_id).events.size(), before);
}

TEST_F(ServiceTest, EventsAreStampedByTheClock) {
  const auto s = service_->start_session("p1", Assignment::force(Group::kA));
  send(s.session_id, "choose_question", {{"question", "why_outcome"}});
  const auto r = service_->record(s.session_id);
  ASSERT_EQ(r.events.size(), 5u);
  for (std::size_t i = 0; i < r.events.size(); ++i) EXPECT_EQ(r.events[i].seq, i + 1);
  EXPECT_EQ(r.events[2].elapsed_ms, 1000);
  EXPECT_EQ(r.events[3].elapsed_ms, 0);
  EXPECT_EQ(r.events[4].artifact_ref, "art-1");
  EXPECT_EQ(store_->artifacts(s.session_id).size(), 1u);
}

TEST_F(ServiceTest, FullSessionOverTheWire) {
  const auto s = service_->start_session("p1", Assignment::force(Group::kB));
  auto out = send(s.session_id, "choose_question", {{"question", "how_to_change"}});
  EXPECT_EQ(types(out), (std::vector<std::string>{"explanation", "annotation", "followup_menu"}));
  out = send(s.session_id, "choose_followup", {{"kind", "validation"}});
  EXPECT_EQ(types(out), (std::vector<std::string>{"explanation", "followup_menu"}));
  send(s.session_id, "end_explanation");
  EXPECT_THROW(service_->finalize_session(s.session_id, {}, ""), Error);
  out = send(s.session_id, "questionnaire");
  ASSERT_EQ(types(out), std::vector<std::string>{"questionnaire"});
  EXPECT_EQ(out[0]["payload"]["items"].size(), 7u);

  json responses = json::object();
  for (const auto& item : service_->questionnaire_items(s.session_id)) responses[item.id] = 3;
  out = send(s.session_id, "questionnaire", {{"responses", responses}});
  EXPECT_TRUE(out.empty());
  out = send(s.session_id, "free_text", {{"text", "clear enough"}});
  ASSERT_EQ(types(out), std::vector<std::string>{"bye"});
  EXPECT_TRUE(service_->is_complete(s.session_id));
  EXPECT_EQ(service_->active_session_count(), 0u);

  const auto stored = store_->load(s.session_id);
  ASSERT_TRUE(stored.questionnaire);
  EXPECT_EQ(stored.questionnaire->size(), 7u);
  EXPECT_EQ(stored.free_text, "clear enough");
  EXPECT_EQ(stored.finalized_at_ms, now_);
  EXPECT_EQ(replay_events(testing::loan_graph(), stored.persona, true, s.session_id, stored.events),
            service_->dialogue_state(s.session_id));
  EXPECT_NO_THROW(service_->start_session("p1"));
}

TEST_F(ServiceTest, FinalizeSessionValidatesResponses) {
  const auto s = service_->start_session("p1", Assignment::force(Group::kA));
  send(s.session_id, "choose_question", {{"question", "why_outcome"}});
  try {
    service_->finalize_session(s.session_id, {}, "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSessionNotEnded);
  }
  send(s.session_id, "end_explanation");
  send(s.session_id, "questionnaire");
  std::vector<LikertResponse> responses;
  for (const auto& item : service_->questionnaire_items(s.session_id)) responses.push_back({item.id, 4});
  auto partial = responses;
  partial.pop_back();
  try {
    service_->finalize_session(s.session_id, partial, "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteQuestionnaire);
  }
  auto twice = responses;
  twice.push_back(responses.front());
  EXPECT_THROW(service_->finalize_session(s.session_id, twice, ""), Error);
  auto out_of_scale = responses;
  out_of_scale[0].value = 6;
  EXPECT_THROW(service_->finalize_session(s.session_id, out_of_scale, ""), Error);
  const auto record = service_->finalize_session(s.session_id, responses, "ok");
  EXPECT_EQ(record.questionnaire, responses);
  EXPECT_TRUE(service_->is_complete(s.session_id));
}

TEST_F(ServiceTest, FileStoreBackedNumberingContinues) {
  testing::TempDir dir("service");
  auto first = make_service(std::make_shared<FileStore>(dir.path()));
  const auto a = first->start_session("p1").session_id;
  auto second = make_service(std::make_shared<FileStore>(dir.path()));
  const auto b = second->start_session("p2").session_id;
  EXPECT_NE(a, b);
  EXPECT_EQ(load_records(dir.path()).size(), 2u);
}

TEST(ServiceConfigTest, RejectsBadPersonaAndGroupModes) {
  ServiceConfig c;
  c.graph = testing::loan_graph();
  c.explainer = testing::loan_explainer();
  c.default_persona = "pilot";
  EXPECT_THROW(SessionService(c, std::make_shared<MemoryStore>()), Error);
  EXPECT_EQ(parse_group_mode("random"), GroupMode::kRandom);
  EXPECT_EQ(parse_group_mode("B"), GroupMode::kB);
  EXPECT_EQ(parse_group_mode("c"), std::nullopt);
}

}  // namespace
}  // namespace xp::session
