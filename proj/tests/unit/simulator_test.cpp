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
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "xp/analytics/analytics.hpp"
#include "xp/sim/simulator.hpp"

namespace xp::sim {
namespace {

session::ServiceConfig config() {
  session::ServiceConfig c;
  c.graph = testing::loan_graph();
  c.explainer = testing::loan_explainer();
  c.seed = 3;
  return c;
}

std::size_t count_moves(const session::SessionRecord& r, protocol::MoveKind kind) {
  std::size_t n = 0;
  for (const auto& e : r.events) {
    const auto* m = std::get_if<protocol::Move>(&e.move);
    n += m && m->kind == kind;
  }
  return n;
}

TEST(Scripts, RandomScriptsAreDeterministicAndVaried) {
  const auto& g = *testing::loan_graph();
  for (std::size_t i = 0; i < 30; ++i) {
    const auto s = random_script(g, 9, i);
    const auto again = random_script(g, 9, i);
    ASSERT_EQ(s.steps.size(), again.steps.size());
    std::set<iff::Intent> intents;
    std::size_t asks = 0;
    for (const auto& step : s.steps) {
      if (step.kind != StepKind::kAsk) continue;
      ++asks;
      intents.insert(g.find_question(step.question)->intent);
    }
    EXPECT_GE(asks, 2u);
    EXPECT_LE(asks, 4u);
    EXPECT_GE(intents.size(), 2u);
    EXPECT_EQ(s.steps.back().kind, StepKind::kFinish);
    for (const auto& step : without_followups(s).steps) EXPECT_NE(step.kind, StepKind::kFollowup);
  }
}

TEST(Simulator, GroupAndBSessionsRunCleanly) {
  Simulator sim(config(), std::make_shared<session::MemoryStore>());
  const auto script = random_script(*testing::loan_graph(), 4, 0);
  for (auto group : {session::Group::kA, session::Group::kB}) {
    auto s = group == session::Group::kA ? without_followups(script) : script;
    s.participant += std::string(session::to_string(group));
    const auto r = sim.run(s, group);
    EXPECT_EQ(r.skipped_steps, 0u);
    EXPECT_EQ(r.protocol_errors, 0u);
    EXPECT_TRUE(r.mirrored_menus);
    ASSERT_TRUE(r.record.questionnaire);
    ASSERT_TRUE(r.record.finalized_at_ms);
    EXPECT_EQ(r.received.back()["type"], "bye");
    const auto followups = count_moves(r.record, protocol::MoveKind::kFollowup);
    if (group == session::Group::kA) {
      EXPECT_EQ(followups, 0u);
    } else {
      EXPECT_GT(followups, 0u);  // at least the automatic complements
    }
  }
}

TEST(Simulator, MissingOptionIsSkipped) {
  Simulator sim(config(), std::make_shared<session::MemoryStore>());
  Script s;
  s.participant = "skip";
  s.steps = {Step::follow(iff::FollowupKind::kValidation, 1000), Step::ask("why_outcome", 1000),
             Step::ask("nope", 1000), Step::finish(1000)};
  const auto r = sim.run(s, session::Group::kA);
  EXPECT_EQ(r.skipped_steps, 2u);
  EXPECT_EQ(r.protocol_errors, 0u);
  EXPECT_TRUE(r.record.questionnaire);
}

TEST(Simulator, ArgumentStep) {
  Simulator sim(config(), std::make_shared<session::MemoryStore>());
  Script s;
  s.participant = "argue";
  s.steps = {Step::ask("why_outcome", 1000), Step::argue("that seems unfair", 2000), Step::finish(1000)};
  const auto r = sim.run(s, session::Group::kA);
  EXPECT_EQ(r.skipped_steps, 0u);
  EXPECT_EQ(count_moves(r.record, protocol::MoveKind::kChallenge), 1u);
}

TEST(Simulator, PairedCohortIsAcceptedAndCoversTwoIntents) {
  Simulator sim(config(), std::make_shared<session::MemoryStore>());
  const auto cohort = run_paired_cohort(sim, *testing::loan_graph(), 5, 1);
  ASSERT_EQ(cohort.a.size(), 5u);
  ASSERT_EQ(cohort.b.size(), 5u);
  std::vector<session::SessionRecord> records;
  for (const auto* side : {&cohort.a, &cohort.b}) {
    for (const auto& r : *side) {
      EXPECT_EQ(r.skipped_steps, 0u);
      EXPECT_EQ(r.protocol_errors, 0u);
      records.push_back(r.record);
    }
  }
  for (const auto& f : analytics::flag_sessions(records, 15)) {
    EXPECT_EQ(f.verdict, analytics::Verdict::kAccept) << f.session_id << " " << f.total_minutes;
  }
  EXPECT_GE(analytics::intent_coverage(records).min_intents, 2u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_GE(analytics::session_total_ms(cohort.b[i].record), analytics::session_total_ms(cohort.a[i].record));
  }
}

}  // namespace
}  // namespace xp::sim
