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

#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "xp/iff/types.hpp"

namespace xp::protocol {

enum class AgentRole { kQuestioner, kExplainer };
inline constexpr std::array<AgentRole, 2> kAllAgents = {AgentRole::kQuestioner,
                                                        AgentRole::kExplainer};
std::string_view to_string(AgentRole agent);
std::optional<AgentRole> parse_agent(std::string_view text);

// Control moves switch between atomic dialogues; locutions are utterances
// inside one.
enum class MoveKind {
  // control
  kBeginQuestion,
  kBeginExplanation,
  kBeginArgument,
  kEndExplanation,
  kEndArgument,
  kFollowup,
  // locutions
  kExplain,
  kAffirmComplement,
  kAffirmReplacement,
  kAffirmValidation,
  kReturnQuestion,
  kChallenge,
};
inline constexpr int kMoveKindCount = 12;

bool is_control(MoveKind kind);
std::string_view to_string(MoveKind kind);  // snake_case, e.g. "affirm_validation"
std::optional<MoveKind> parse_move_kind(std::string_view text);
MoveKind affirm_kind_for(iff::FollowupKind kind);

// One move. Only the field matching `kind` is meaningful:
//   question_id  BeginQuestion, ReturnQuestion
//   type_id      Explain (the explanation type being delivered)
//   followup     Followup
//   text         Challenge
struct Move {
  MoveKind kind = MoveKind::kBeginExplanation;
  std::string question_id;
  std::string type_id;
  iff::FollowupKind followup = iff::FollowupKind::kComplement;
  std::string text;

  static Move begin_question(std::string question_id);
  static Move begin_explanation();
  static Move begin_argument();
  static Move end_explanation();
  static Move end_argument();
  static Move followup_on(iff::FollowupKind kind);
  static Move explain(std::string type_id);
  static Move affirm(iff::FollowupKind kind);
  static Move return_question(std::string question_id);
  static Move challenge(std::string text);

  auto operator<=>(const Move&) const = default;
  bool operator==(const Move&) const = default;
};

// Human readable form, e.g. "Followup(validation)", "Explain(counterfactual)".
std::string to_string(const Move& move);

enum class TopicKind { kExplanationTarget, kIntent, kFree };

struct Topic {
  TopicKind kind = TopicKind::kExplanationTarget;
  iff::Intent intent = iff::Intent::kTransparency;
  std::string question_id;
  std::string text;

  static Topic explanation_target();
  static Topic intent_topic(iff::Intent intent, std::string question_id);
  static Topic free(std::string text);

  auto operator<=>(const Topic&) const = default;
  bool operator==(const Topic&) const = default;
};

std::string to_string(const Topic& topic);

nlohmann::json to_json(const Move& move);
Move move_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Topic& topic);
Topic topic_from_json(const nlohmann::json& j);

}  // namespace xp::protocol
