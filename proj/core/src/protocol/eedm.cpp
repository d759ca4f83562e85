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

#include "xp/protocol/eedm.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace xp::protocol {

using nlohmann::json;

namespace {

constexpr auto Q = AgentRole::kQuestioner;
constexpr auto E = AgentRole::kExplainer;
constexpr auto kGE = AtomicDialogueKind::kExplanation;
constexpr auto kGA = AtomicDialogueKind::kArgumentation;
constexpr auto kGF = AtomicDialogueKind::kFollowup;

std::vector<TransitionRule> make_table() {
  using P = Phase;
  using S = Stage;
  using M = MoveKind;
  return {
      {P::kIdle, S::kNone, Q, M::kBeginQuestion, P::kInQuestion, kGE},
      {P::kInQuestion, S::kNone, E, M::kBeginExplanation, P::kInExplanation, kGE},
      {P::kInExplanation, S::kAwaitingExplain, E, M::kExplain, P::kInExplanation, kGE},
      {P::kInExplanation, S::kExplained, Q, M::kFollowup, P::kInFollowup, kGF},
      {P::kInExplanation, S::kExplained, Q, M::kReturnQuestion, P::kInExplanation, kGE},
      {P::kInExplanation, S::kExplained, Q, M::kBeginArgument, P::kInArgument, kGA},
      {P::kInExplanation, S::kExplained, Q, M::kEndExplanation, P::kIdle, kGE},
      {P::kInFollowup, S::kAwaitingExplain, E, M::kExplain, P::kInFollowup, kGF},
      {P::kInFollowup, S::kExplained, Q, M::kAffirmComplement, P::kInExplanation, kGF},
      {P::kInFollowup, S::kExplained, Q, M::kAffirmReplacement, P::kInExplanation, kGF},
      {P::kInFollowup, S::kExplained, Q, M::kAffirmValidation, P::kInExplanation, kGF},
      {P::kInArgument, S::kAwaitingChallenge, Q, M::kChallenge, P::kInArgument, kGA},
      {P::kInArgument, S::kChallenged, Q, M::kEndArgument, P::kInExplanation, kGA},
  };
}

std::string explained_prop(const std::string& question, const std::string& type) {
  return "explained:" + question + ":" + type;
}

std::string affirmed_prop(iff::FollowupKind kind, const std::string& type) {
  return "affirmed:" + std::string(iff::to_string(kind)) + ":" + type;
}

// Expands one rule into concrete moves for the given state.
void expand(const DialogueState& s, const TransitionRule& rule, std::vector<LegalMove>& out) {
  const iff::UserQuestion* q = s.active();
  switch (rule.move) {
    case MoveKind::kBeginQuestion:
      for (const auto& question : s.view->questions) {
        out.emplace_back(rule.agent, Move::begin_question(question.id));
      }
      break;
    case MoveKind::kReturnQuestion:
      for (const auto& question : s.view->questions) {
        if (question.id != *s.active_question) {
          out.emplace_back(rule.agent, Move::return_question(question.id));
        }
      }
      break;
    case MoveKind::kExplain:
      if (s.phase == Phase::kInFollowup) {
        out.emplace_back(rule.agent, Move::explain(s.followup->type_id));
      } else if (q && !q->recommended.empty()) {
        out.emplace_back(rule.agent, Move::explain(q->recommended_type()));
      }
      break;
    case MoveKind::kFollowup:
      if (!s.followups_enabled || !q) break;
      for (auto kind : iff::kAllFollowupKinds) {
        if (iff::select_followup_edge(*q, s.delivered_types, kind)) {
          out.emplace_back(rule.agent, Move::followup_on(kind));
        }
      }
      break;
    case MoveKind::kAffirmComplement:
    case MoveKind::kAffirmReplacement:
    case MoveKind::kAffirmValidation:
      if (s.followup && affirm_kind_for(s.followup->kind) == rule.move) {
        out.emplace_back(rule.agent, Move::affirm(s.followup->kind));
      }
      break;
    case MoveKind::kChallenge:
      out.emplace_back(rule.agent, Move::challenge(""));
      break;
    default: {
      Move m;
      m.kind = rule.move;
      out.emplace_back(rule.agent, m);
      break;
    }
  }
}

const Topic& top(const DialogueState& s) { return s.topic_stack.back(); }

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kIdle: return "idle";
    case Phase::kInQuestion: return "in_question";
    case Phase::kInExplanation: return "in_explanation";
    case Phase::kInFollowup: return "in_followup";
    case Phase::kInArgument: return "in_argument";
    case Phase::kEnded: return "ended";
  }
  return "?";
}

std::optional<Phase> parse_phase(std::string_view text) {
  for (auto p : {Phase::kIdle, Phase::kInQuestion, Phase::kInExplanation, Phase::kInFollowup,
                 Phase::kInArgument, Phase::kEnded}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::string_view to_string(AtomicDialogueKind kind) {
  switch (kind) {
    case AtomicDialogueKind::kExplanation: return "explanation";
    case AtomicDialogueKind::kArgumentation: return "argumentation";
    case AtomicDialogueKind::kFollowup: return "followup";
  }
  return "?";
}

const std::vector<TransitionRule>& transition_table() {
  static const std::vector<TransitionRule> table = make_table();
  return table;
}

AtomicDialogueSpec dialogue_spec(AtomicDialogueKind kind) {
  AtomicDialogueSpec spec;
  spec.kind = kind;
  for (const auto& rule : transition_table()) {
    if (rule.dialogue != kind) continue;
    spec.combination_rules.push_back(rule);
    if (!is_control(rule.move)) spec.permitted_locutions.insert(rule.move);
  }
  switch (kind) {
    case AtomicDialogueKind::kExplanation:
      spec.termination_moves = {MoveKind::kEndExplanation, MoveKind::kReturnQuestion};
      spec.commitment_effects[MoveKind::kExplain] = "explained:<question>:<type>";
      break;
    case AtomicDialogueKind::kArgumentation:
      spec.termination_moves = {MoveKind::kEndArgument};
      break;
    case AtomicDialogueKind::kFollowup:
      spec.termination_moves = {MoveKind::kAffirmComplement, MoveKind::kAffirmReplacement,
                                MoveKind::kAffirmValidation};
      spec.commitment_effects[MoveKind::kExplain] = "explained:<question>:<type>";
      for (auto m : spec.termination_moves) {
        spec.commitment_effects[m] = "affirmed:<kind>:<type>";
      }
      break;
  }
  return spec;
}

const iff::UserQuestion* DialogueState::active() const {
  if (!active_question || !view) return nullptr;
  return view->find_question(*active_question);
}

bool DialogueState::operator==(const DialogueState& o) const {
  bool same_view = (view == o.view) || (view && o.view && *view == *o.view);
  return same_view && session_id == o.session_id && user_group == o.user_group &&
         followups_enabled == o.followups_enabled && phase == o.phase &&
         topic_stack == o.topic_stack && active_question == o.active_question &&
         delivered_types == o.delivered_types &&
         recommended_delivered == o.recommended_delivered && followup == o.followup &&
         argument_challenged == o.argument_challenged && commitments == o.commitments &&
         history == o.history;
}

DialogueState new_session(std::shared_ptr<const iff::IffGraph> graph, std::string_view user_group,
                          bool followups_enabled, std::string session_id) {
  DialogueState s;
  s.session_id = std::move(session_id);
  s.view = std::make_shared<const iff::IffGraph>(iff::select_view(*graph, user_group));
  s.user_group = std::string(user_group);
  s.followups_enabled = followups_enabled;
  s.topic_stack.push_back(Topic::explanation_target());
  return s;
}

DialogueState new_session(const iff::IffGraph& graph, std::string_view user_group,
                          bool followups_enabled, std::string session_id) {
  return new_session(std::make_shared<const iff::IffGraph>(graph), user_group, followups_enabled,
                     std::move(session_id));
}

Stage stage_of(const DialogueState& s) {
  switch (s.phase) {
    case Phase::kInExplanation:
      return s.recommended_delivered ? Stage::kExplained : Stage::kAwaitingExplain;
    case Phase::kInFollowup:
      return s.followup && s.followup->explained ? Stage::kExplained : Stage::kAwaitingExplain;
    case Phase::kInArgument:
      return s.argument_challenged ? Stage::kChallenged : Stage::kAwaitingChallenge;
    default:
      return Stage::kNone;
  }
}

std::vector<LegalMove> legal_moves(const DialogueState& s) {
  std::vector<LegalMove> out;
  const Stage stage = stage_of(s);
  for (const auto& rule : transition_table()) {
    if (rule.phase == s.phase && rule.stage == stage) expand(s, rule, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_legal(const DialogueState& s, AgentRole agent, const Move& move) {
  Move probe = move;
  if (probe.kind == MoveKind::kChallenge) probe.text.clear();
  const auto legal = legal_moves(s);
  return std::find(legal.begin(), legal.end(), LegalMove{agent, probe}) != legal.end();
}

DialogueState apply_move(const DialogueState& state, AgentRole agent, const Move& move) {
  if (!is_legal(state, agent, move)) {
    throw ProtocolError(state.phase, agent, move, legal_moves(state),
                        std::string(to_string(agent)) + " may not " + to_string(move) +
                            " in phase " + std::string(to_string(state.phase)));
  }
  DialogueState s = state;
  Topic annotation = top(s);
  switch (move.kind) {
    case MoveKind::kBeginQuestion: {
      const iff::UserQuestion* q = s.view->find_question(move.question_id);
      s.topic_stack.push_back(Topic::intent_topic(q->intent, q->id));
      s.active_question = q->id;
      s.delivered_types.clear();
      s.recommended_delivered = false;
      s.phase = Phase::kInQuestion;
      annotation = top(s);
      break;
    }
    case MoveKind::kBeginExplanation:
      s.phase = Phase::kInExplanation;
      break;
    case MoveKind::kExplain:
      s.delivered_types.insert(move.type_id);
      s.commitments.push_back({AgentRole::kExplainer, explained_prop(*s.active_question, move.type_id)});
      if (s.phase == Phase::kInFollowup) {
        s.followup->explained = true;
      } else {
        s.recommended_delivered = true;
      }
      break;
    case MoveKind::kFollowup: {
      const iff::UserQuestion* q = s.active();
      std::size_t idx = *iff::select_followup_edge(*q, s.delivered_types, move.followup);
      s.followup = FollowupEpisode{move.followup, idx, q->followups[idx].type_id, false};
      s.phase = Phase::kInFollowup;
      break;
    }
    case MoveKind::kAffirmComplement:
    case MoveKind::kAffirmReplacement:
    case MoveKind::kAffirmValidation:
      s.commitments.push_back(
          {AgentRole::kQuestioner, affirmed_prop(s.followup->kind, s.followup->type_id)});
      s.followup.reset();
      s.phase = Phase::kInExplanation;
      break;
    case MoveKind::kReturnQuestion: {
      const iff::UserQuestion* q = s.view->find_question(move.question_id);
      s.topic_stack.back() = Topic::intent_topic(q->intent, q->id);
      s.active_question = q->id;
      s.delivered_types.clear();
      s.recommended_delivered = false;
      s.phase = Phase::kInExplanation;
      annotation = top(s);
      break;
    }
    case MoveKind::kBeginArgument:
      s.argument_challenged = false;
      s.phase = Phase::kInArgument;
      break;
    case MoveKind::kChallenge:
      s.argument_challenged = true;
      break;
    case MoveKind::kEndArgument:
      s.argument_challenged = false;
      s.phase = Phase::kInExplanation;
      break;
    case MoveKind::kEndExplanation:
      s.topic_stack.pop_back();
      s.active_question.reset();
      s.delivered_types.clear();
      s.recommended_delivered = false;
      s.phase = Phase::kIdle;
      break;
  }
  s.history.push_back({agent, move, std::move(annotation)});
  return s;
}

DialogueState affirm(const DialogueState& state, iff::FollowupKind kind) {
  if (state.phase != Phase::kInFollowup || !state.followup || !state.followup->explained) {
    throw ProtocolError(state.phase, AgentRole::kQuestioner, Move::affirm(kind), legal_moves(state),
                        "affirm requires a followup whose explanation has been delivered");
  }
  if (state.followup->kind != kind) {
    throw ProtocolError(state.phase, AgentRole::kQuestioner, Move::affirm(kind), legal_moves(state),
                        "followup was opened as " + std::string(iff::to_string(state.followup->kind)) +
                            ", cannot affirm " + std::string(iff::to_string(kind)));
  }
  return apply_move(state, AgentRole::kQuestioner, Move::affirm(kind));
}

DialogueState end_dialogue(const DialogueState& state) {
  if (state.phase != Phase::kIdle) {
    throw ProtocolError(state.phase, AgentRole::kQuestioner, std::nullopt, legal_moves(state),
                        "the dialogue can only end between questions");
  }
  DialogueState s = state;
  s.phase = Phase::kEnded;
  return s;
}

std::vector<TranscriptEntry> transcript(const DialogueState& state) {
  std::vector<TranscriptEntry> out;
  out.reserve(state.history.size());
  for (const auto& h : state.history) out.push_back({h.agent, h.move, h.topic});
  return out;
}

json state_to_json(const DialogueState& s) {
  json j;
  j["session_id"] = s.session_id;
  j["graph"] = s.view ? s.view->name : "";
  j["user_group"] = s.user_group;
  j["followups_enabled"] = s.followups_enabled;
  j["phase"] = std::string(to_string(s.phase));
  json topics = json::array();
  for (const auto& t : s.topic_stack) topics.push_back(to_json(t));
  j["topic_stack"] = std::move(topics);
  j["active_question"] = s.active_question ? json(*s.active_question) : json(nullptr);
  j["delivered_types"] = json(std::vector<std::string>(s.delivered_types.begin(), s.delivered_types.end()));
  j["recommended_delivered"] = s.recommended_delivered;
  if (s.followup) {
    j["followup"] = {{"kind", std::string(iff::to_string(s.followup->kind))},
                     {"edge_index", s.followup->edge_index},
                     {"type", s.followup->type_id},
                     {"explained", s.followup->explained}};
  } else {
    j["followup"] = nullptr;
  }
  j["argument_challenged"] = s.argument_challenged;
  json commitments = json::array();
  for (const auto& c : s.commitments) {
    commitments.push_back({{"agent", std::string(to_string(c.agent))}, {"proposition", c.proposition}});
  }
  j["commitments"] = std::move(commitments);
  json history = json::array();
  for (const auto& h : s.history) {
    history.push_back({{"agent", std::string(to_string(h.agent))},
                       {"move", to_json(h.move)},
                       {"topic", to_json(h.topic)}});
  }
  j["history"] = std::move(history);
  return j;
}

std::string to_string(const LegalMove& move) {
  return std::string(to_string(move.first)) + ":" + to_string(move.second);
}

}  // namespace xp::protocol
