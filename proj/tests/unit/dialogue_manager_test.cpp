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

#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "xp/bt/dialogue_manager.hpp"

namespace xp::bt {
namespace {

using protocol::MoveKind;
using protocol::Phase;

std::vector<std::string> types(const StepResult& r) {
  std::vector<std::string> out;
  for (const auto& m : r.messages) out.push_back(m.type);
  return out;
}

UserInput ask(const std::string& q) {
  UserInput in;
  in.kind = InputKind::kChooseQuestion;
  in.question_id = q;
  return in;
}

UserInput simple(InputKind kind) {
  UserInput in;
  in.kind = kind;
  return in;
}

UserInput followup(iff::FollowupKind kind) {
  UserInput in;
  in.kind = InputKind::kChooseFollowup;
  in.followup = kind;
  return in;
}

class ManagerTest : public ::testing::Test {
 protected:
  std::unique_ptr<DialogueManager> make(bool followups, std::string persona = "loan_applicant") {
    ManagerConfig config;
    config.followups_enabled = followups;
    config.persona = std::move(persona);
    config.seed = 11;
    return std::make_unique<DialogueManager>(testing::loan_graph(), testing::loan_explainer(), config, "s-1");
  }
};

TEST(BuildTree, OneStrategyPerQuestion) {
  const auto tree = build_tree(*testing::loan_graph());
  const BtNode* strategies = const_cast<BtNode&>(*tree).find("explanation_strategy");
  ASSERT_NE(strategies, nullptr);
  EXPECT_EQ(strategies->kind, NodeKind::kFallback);
  EXPECT_EQ(strategies->children.size(), 6u);
  const BtNode* eval = const_cast<BtNode&>(*tree).find("evaluation_strategy");
  ASSERT_EQ(eval->children.size(), 2u);
  EXPECT_EQ(eval->children[0]->key, "questionnaire");
  EXPECT_EQ(eval->children[1]->key, "free_text");
}

TEST(BuildTree, RejectsEmptyGraph) {
  auto g = *testing::loan_graph();
  g.questions.clear();
  g.persona_filters.clear();
  try {
    build_tree(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidGraph);
  }
}

TEST(EvaluationQueue, AppendsOnceInOrder) {
  Blackboard bb;
  enqueue_evaluation(bb, "b");
  enqueue_evaluation(bb, "a");
  enqueue_evaluation(bb, "b");
  EXPECT_EQ(bb.get<std::vector<std::string>>("eval.queue"), (std::vector<std::string>{"eval:b", "eval:a"}));
}

TEST_F(ManagerTest, PersonaMenuWhenNotPreselected) {
  auto m = make(false, "");
  auto r = m->step();
  ASSERT_EQ(types(r), std::vector<std::string>{"menu"});
  EXPECT_EQ(r.messages[0].payload["kind"], "persona");
  EXPECT_EQ(m->state(), nullptr);
  UserInput bad = simple(InputKind::kPersona);
  bad.persona = "pilot";
  r = m->step(bad);
  ASSERT_EQ(types(r), std::vector<std::string>{"protocol_error"});
  UserInput good = simple(InputKind::kPersona);
  good.persona = "loan_applicant";
  r = m->step(good);
  ASSERT_NE(m->state(), nullptr);
  EXPECT_EQ(types(r), std::vector<std::string>{"menu"});
  EXPECT_EQ(r.messages[0].payload["kind"], "questions");
}

TEST_F(ManagerTest, FirstTickShowsQuestionMenu) {
  auto m = make(false);
  const auto r = m->step();
  EXPECT_EQ(r.status, BtStatus::kRunning);
  ASSERT_EQ(types(r), std::vector<std::string>{"menu"});
  const auto& p = r.messages[0].payload;
  EXPECT_EQ(p["options"].size(), 7u);  // six questions and "no more questions"
  EXPECT_TRUE(p["target"].contains("decision"));
  ASSERT_EQ(r.events.size(), 2u);
  EXPECT_EQ(std::get<session::SessionAction>(r.events[0].move), session::SessionAction::kSelectPersona);
  EXPECT_EQ(std::get<session::SessionAction>(r.events[1].move), session::SessionAction::kPresentTarget);
}

TEST_F(ManagerTest, TickWithoutInputOnlyAdvancesTheCounter) {
  auto m = make(true);
  m->step();
  const auto state = *m->state();
  const auto queue = m->evaluation_queue();
  const auto ticks = m->ticks();
  const auto r = m->step();
  EXPECT_TRUE(r.messages.empty());
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(*m->state(), state);
  EXPECT_EQ(m->evaluation_queue(), queue);
  EXPECT_EQ(m->ticks(), ticks + 1);
}

TEST_F(ManagerTest, GroupAGetsPlainMenuAfterExplanation) {
  auto m = make(false);
  m->step();
  const auto r = m->step(ask("why_outcome"));
  EXPECT_EQ(types(r), (std::vector<std::string>{"explanation", "menu"}));
  EXPECT_EQ(r.messages[1].payload["kind"], "explanation");
  EXPECT_EQ(m->state()->phase, Phase::kInExplanation);
  EXPECT_EQ(m->evaluation_queue(), std::vector<std::string>{"eval:why_outcome"});
  for (const auto& opt : r.messages[1].payload["options"]) {
    EXPECT_NE(opt["send"]["type"], "choose_followup");
  }
}

TEST_F(ManagerTest, GroupBGetsComplementAndFollowupMenu) {
  auto m = make(true);
  m->step();
  const auto r = m->step(ask("why_outcome"));
  EXPECT_EQ(types(r), (std::vector<std::string>{"explanation", "annotation", "followup_menu"}));
  EXPECT_EQ(r.messages[1].payload["annotates"], r.messages[0].payload["artifact"]["id"]);
  const auto& kinds = r.messages[2].payload["followups"];
  std::vector<std::string> offered;
  for (const auto& f : kinds) offered.push_back(f["kind"]);
  EXPECT_EQ(offered, (std::vector<std::string>{"replacement", "validation"}));
  EXPECT_EQ(m->state()->phase, Phase::kInExplanation);
  EXPECT_EQ(m->apply_failures(), 0u);
}

TEST_F(ManagerTest, FollowupRunsEdgeAndAffirms) {
  auto m = make(true);
  m->step();
  m->step(ask("how_to_change"));
  const auto r = m->step(followup(iff::FollowupKind::kValidation));
  EXPECT_EQ(types(r), (std::vector<std::string>{"explanation", "followup_menu"}));
  EXPECT_EQ(r.messages[0].payload["followup"], "validation");
  const auto& hist = m->state()->history;
  EXPECT_EQ(hist.back().move.kind, MoveKind::kAffirmValidation);
  EXPECT_EQ(m->apply_failures(), 0u);
}

TEST_F(ManagerTest, UnavailableFollowupIsRejectedWithOptions) {
  auto m = make(false);
  m->step();
  m->step(ask("why_outcome"));
  const auto r = m->step(followup(iff::FollowupKind::kValidation));
  ASSERT_EQ(types(r), std::vector<std::string>{"protocol_error"});
  EXPECT_EQ(r.messages[0].payload["phase"], "in_explanation");
  EXPECT_FALSE(r.messages[0].payload["options"].empty());
  EXPECT_FALSE(r.messages[0].payload["expected"].empty());
}

TEST_F(ManagerTest, ReturnQuestionOpensNextQuestionDirectly) {
  auto m = make(false);
  m->step();
  m->step(ask("why_outcome"));
  const auto r = m->step(ask("how_to_change"));
  EXPECT_EQ(types(r), (std::vector<std::string>{"explanation", "menu"}));
  EXPECT_EQ(*m->state()->active_question, "how_to_change");
  EXPECT_EQ(m->evaluation_queue(), (std::vector<std::string>{"eval:why_outcome", "eval:how_to_change"}));
}

TEST_F(ManagerTest, ArgumentRoundTrip) {
  auto m = make(false);
  m->step();
  m->step(ask("why_outcome"));
  auto r = m->step(simple(InputKind::kBeginArgument));
  ASSERT_EQ(types(r), std::vector<std::string>{"menu"});
  EXPECT_EQ(r.messages[0].payload["kind"], "argument");
  UserInput argue = simple(InputKind::kArgue);
  argue.text = "my income is higher";
  r = m->step(argue);
  EXPECT_EQ(types(r), std::vector<std::string>{"menu"});
  EXPECT_EQ(m->state()->phase, Phase::kInExplanation);
}

TEST_F(ManagerTest, FullSessionCompletes) {
  auto m = make(true);
  m->step();
  m->step(ask("why_outcome"));
  auto r = m->step(simple(InputKind::kEndExplanation));
  EXPECT_EQ(types(r), std::vector<std::string>{"menu"});
  EXPECT_EQ(r.messages[0].payload["kind"], "questions");
  r = m->step(ask("why_outcome"));  // asking again is allowed and not re-queued
  EXPECT_EQ(m->evaluation_queue().size(), 1u);
  m->step(simple(InputKind::kEndExplanation));
  r = m->step(simple(InputKind::kOpenQuestionnaire));
  ASSERT_EQ(types(r), std::vector<std::string>{"questionnaire"});
  EXPECT_EQ(m->state()->phase, Phase::kEnded);
  const auto items = m->questionnaire_items();
  ASSERT_EQ(items.size(), 7u);
  EXPECT_EQ(items.back().id, "eval:why_outcome");

  UserInput answers = simple(InputKind::kQuestionnaire);
  for (const auto& it : items) answers.responses[it.id] = 4;
  answers.responses.erase("ess_trust");
  r = m->step(answers);
  ASSERT_EQ(types(r), std::vector<std::string>{"protocol_error"});
  EXPECT_EQ(r.messages[0].payload["code"], "incomplete_questionnaire");
  answers.responses["ess_trust"] = 9;
  r = m->step(answers);
  EXPECT_EQ(r.messages[0].payload["code"], "schema_error");
  answers.responses["ess_trust"] = 5;
  r = m->step(answers);
  EXPECT_TRUE(r.messages.empty());
  EXPECT_FALSE(m->complete());

  UserInput text = simple(InputKind::kFreeText);
  text.text = "fine";
  r = m->step(text);
  EXPECT_EQ(r.status, BtStatus::kSuccess);
  ASSERT_EQ(types(r), std::vector<std::string>{"bye"});
  EXPECT_TRUE(m->complete());
  r = m->step(text);
  ASSERT_EQ(types(r), std::vector<std::string>{"protocol_error"});
  EXPECT_EQ(r.messages[0].payload["code"], "session_complete");
}

TEST_F(ManagerTest, EvaluationNodesFollowExploredQuestions) {
  auto m = make(false);
  m->step();
  m->step(ask("how_to_change"));
  m->step(ask("why_outcome"));
  const BtNode* eval = const_cast<BtNode&>(m->tree()).find("evaluation_strategy");
  ASSERT_EQ(eval->children.size(), 4u);
  EXPECT_EQ(eval->children[1]->key, "evaluation_question:how_to_change");
  EXPECT_EQ(eval->children[2]->key, "evaluation_question:why_outcome");
  EXPECT_EQ(eval->children[3]->key, "free_text");
}

TEST_F(ManagerTest, InputInWrongPlaceIsRejected) {
  auto m = make(false);
  m->step();
  const auto r = m->step(simple(InputKind::kFreeText));
  ASSERT_EQ(types(r), std::vector<std::string>{"protocol_error"});
  EXPECT_EQ(r.messages[0].payload["phase"], "idle");
}

TEST_F(ManagerTest, SameSeedSameTarget) {
  auto a = make(false);
  auto b = make(false);
  const auto ra = a->step();
  const auto rb = b->step();
  EXPECT_EQ(ra.messages[0].payload["target"], rb.messages[0].payload["target"]);
}

}  // namespace
}  // namespace xp::bt
