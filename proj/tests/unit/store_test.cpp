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

#include <fstream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "xp/error.hpp"
#include "xp/session/store.hpp"

namespace xp::session {
namespace {

SessionRecord header(const std::string& id) {
  SessionRecord r;
  r.session_id = id;
  r.participant_id = "p-" + id;
  r.group = Group::kA;
  r.persona = "loan_applicant";
  r.started_at_ms = 1000;
  return r;
}

InteractionEvent event(const std::string& id, std::uint64_t seq) {
  InteractionEvent e;
  e.session_id = id;
  e.seq = seq;
  e.wall_time_ms = 1000 + static_cast<std::int64_t>(seq) * 10;
  e.elapsed_ms = 10;
  e.move = seq % 2 ? EventMove(protocol::Move::end_explanation()) : EventMove(SessionAction::kPresentTarget);
  return e;
}

explain::ExplanationArtifact artifact(const std::string& id) {
  explain::ExplanationArtifact a;
  a.id = id;
  a.type_id = "textual_explanation";
  a.payload = explain::TextAnnotation{"hello", "art-0"};
  a.provenance.technique = "template_nlg";
  return a;
}

// Both implementations must behave the same.
void exercise(SessionStore& store) {
  store.create(header("s1"));
  store.create(header("s2"));
  try {
    store.create(header("s1"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateId);
  }
  store.append_events("s1", {event("s1", 1), event("s1", 2)});
  store.append_events("s1", {event("s1", 3)});
  EXPECT_THROW(store.append_events("s1", {event("s1", 3)}), Error);  // seq must increase
  EXPECT_THROW(store.append_events("zz", {event("zz", 1)}), Error);
  store.append_artifact("s1", artifact("art-1"));

  auto r = store.load("s1");
  ASSERT_EQ(r.events.size(), 3u);
  EXPECT_EQ(r.events[2], event("s1", 3));
  EXPECT_FALSE(r.questionnaire);
  EXPECT_EQ(store.artifacts("s1"), std::vector<explain::ExplanationArtifact>{artifact("art-1")});
  EXPECT_TRUE(store.artifacts("s2").empty());

  r.questionnaire = std::vector<LikertResponse>{{"ess_trust", 5}};
  r.free_text = "done";
  r.finalized_at_ms = 2000;
  store.finalize(r);
  EXPECT_EQ(store.load("s1"), r);
  EXPECT_EQ(store.session_ids(), (std::vector<std::string>{"s1", "s2"}));
  try {
    store.load("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownSession);
  }
}

TEST(MemoryStore, Contract) {
  MemoryStore store;
  exercise(store);
}

TEST(FileStore, Contract) {
  testing::TempDir dir("store");
  FileStore store(dir.path() / "logs");
  exercise(store);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "logs" / "s1.events.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "logs" / "index.jsonl"));
}

TEST(FileStore, ReopenSeesSameData) {
  testing::TempDir dir("reopen");
  SessionRecord expected;
  {
    FileStore store(dir.path());
    store.create(header("s1"));
    store.append_events("s1", {event("s1", 1), event("s1", 2)});
    expected = store.load("s1");
  }
  FileStore again(dir.path());
  EXPECT_EQ(again.load("s1"), expected);
  again.append_events("s1", {event("s1", 3)});
  EXPECT_EQ(again.load("s1").events.size(), 3u);
  const auto records = load_records(dir.path());
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].events.size(), 3u);
}

TEST(FileStore, EventLogReaderSkipsBlankLines) {
  testing::TempDir dir("reader");
  const auto path = dir.path() / "x.events.jsonl";
  {
    std::ofstream out(path);
    out << to_jsonl_line(event("s", 1)) << "\n\n" << to_jsonl_line(event("s", 2)) << "\n";
  }
  EXPECT_EQ(read_event_log(path).size(), 2u);
  {
    std::ofstream out(path, std::ios::app);
    out << "{broken\n";
  }
  EXPECT_THROW(read_event_log(path), Error);
}

TEST(FileStore, ConcurrentSessionsKeepTheirOrder) {
  testing::TempDir dir("concurrent");
  FileStore store(dir.path());
  constexpr int kSessions = 4;
  constexpr int kEvents = 200;
  for (int s = 0; s < kSessions; ++s) store.create(header("s" + std::to_string(s)));
  std::vector<std::thread> threads;
  for (int s = 0; s < kSessions; ++s) {
    threads.emplace_back([&store, s] {
      const std::string id = "s" + std::to_string(s);
      for (int i = 1; i <= kEvents; ++i) store.append_events(id, {event(id, static_cast<std::uint64_t>(i))});
    });
  }
  for (auto& t : threads) t.join();
  for (int s = 0; s < kSessions; ++s) {
    const auto r = store.load("s" + std::to_string(s));
    ASSERT_EQ(r.events.size(), static_cast<std::size_t>(kEvents));
    for (int i = 0; i < kEvents; ++i) EXPECT_EQ(r.events[static_cast<std::size_t>(i)].seq, static_cast<std::uint64_t>(i + 1));
  }
}

}  // namespace
}  // namespace xp::session
