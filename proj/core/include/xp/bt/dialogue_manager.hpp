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

// The conversation driver: a behaviour tree whose action nodes turn user
// choices into protocol moves, run explainers and queue server messages.
//
//   root (sequence)
//   ├─ persona                        choose the user group
//   ├─ explanation_target             pick the instance to explain
//   ├─ explanation_loop (repeat)
//   │  └─ explanation_need (sequence)
//   │     ├─ choose_question          menu; fails when the user is done
//   │     └─ explanation_strategy (fallback)
//   │        └─ strategy:<q> (guard active_question:<q>), one per question
//   │           └─ sequence
//   │              ├─ explain:<q>     recommended type
//   │              ├─ auto_complement:<q>
//   │              └─ followups:<q> (repeat)
//   │                 └─ sequence
//   │                    ├─ await_followup:<q>
//   │                    └─ followup_explainers:<q> (fallback)
//   │                       └─ guard followup_edge:<q>:<i> → explain_followup:<q>:<i>
//   └─ evaluation_strategy (sequence)
//      ├─ questionnaire
//      ├─ evaluation_question:<q>     appended per explored question
//      └─ free_text

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xp/bt/tree.hpp"
#include "xp/explain/suite.hpp"
#include "xp/iff/iff.hpp"
#include "xp/protocol/eedm.hpp"
#include "xp/session/events.hpp"

namespace xp::bt {

enum class InputKind {
  kPersona,
  kChooseQuestion,
  kChooseFollowup,
  kEndExplanation,
  kBeginArgument,
  kArgue,
  kOpenQuestionnaire,
  kQuestionnaire,
  kFreeText,
};
std::string_view to_string(InputKind kind);

struct UserInput {
  InputKind kind = InputKind::kChooseQuestion;
  std::string persona;
  std::string question_id;
  iff::FollowupKind followup = iff::FollowupKind::kComplement;
  std::string text;
  std::map<std::string, int> responses;
};

struct OutMessage {
  std::string type;  // menu, explanation, annotation, followup_menu, questionnaire, protocol_error, bye
  nlohmann::json payload;
};

struct EventDraft {
  protocol::AgentRole agent;
  session::EventMove move;
  protocol::Topic topic;
  std::optional<std::string> artifact_ref;
};

enum class TargetMode { kRandomTestSample, kRow, kInstance };

struct ManagerConfig {
  bool followups_enabled = false;
  std::string persona;  // preselected user group; empty asks the user
  TargetMode target_mode = TargetMode::kRandomTestSample;
  std::size_t target_row = 0;
  explain::Instance target_instance;
  std::uint64_t seed = 0;
};

// Builds the tree for a validated graph. Throws kInvalidGraph when the
// graph has no questions or fails validation.
std::unique_ptr<BtNode> build_tree(const iff::IffGraph& graph);

// Appends the question's evaluation item to "eval.queue" unless present.
void enqueue_evaluation(Blackboard& bb, const std::string& question_id);

struct StepResult {
  BtStatus status;
  std::vector<OutMessage> messages;
  std::vector<EventDraft> events;
};

class DialogueManager {
 public:
  DialogueManager(std::shared_ptr<const iff::IffGraph> graph,
                  std::shared_ptr<const explain::ExplainerContext> explainer, ManagerConfig config,
                  std::string session_id);
  // Handlers capture `this`.
  DialogueManager(const DialogueManager&) = delete;
  DialogueManager& operator=(const DialogueManager&) = delete;

  // One tick with optional pending input. Input no node consumed is
  // answered with a protocol_error.
  StepResult step(std::optional<UserInput> input = std::nullopt);

  bool complete() const { return complete_; }
  std::uint64_t ticks() const;
  // Failed apply_move calls from handlers; stays zero by construction.
  std::uint64_t apply_failures() const;

  const protocol::DialogueState* state() const;
  const Blackboard& blackboard() const { return bb_; }
  Blackboard& blackboard() { return bb_; }
  const BtNode& tree() const { return *tree_; }
  const std::map<std::string, explain::ExplanationArtifact>& artifacts() const;
  const std::vector<std::string>& evaluation_queue() const;
  std::optional<std::string> last_handler_error() const { return ticker_.last_error(); }

  // Evaluation items shown in the questionnaire: the satisfaction scale
  // followed by one item per explored question.
  std::vector<session::QuestionnaireItem> questionnaire_items() const;

 private:
  void register_handlers();
  void append_evaluation_node(const std::string& question_id);

  std::shared_ptr<const iff::IffGraph> graph_;
  std::shared_ptr<const explain::ExplainerContext> explainer_;
  ManagerConfig config_;
  std::string session_id_;
  std::unique_ptr<BtNode> tree_;
  Registry registry_;
  Ticker ticker_;
  Blackboard bb_;
  bool complete_ = false;
};

}  // namespace xp::bt
