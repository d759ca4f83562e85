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

// The explanation-experience dialogue protocol as a pure state machine.
//
// A conversation is a sequence of atomic dialogues: explanation (one per
// user question), argumentation (a challenge raised against an explanation)
// and followup (a secondary explanation that complements, replaces or
// validates the recommended one). Every transition is listed in one rule
// table; legal_moves and apply_move are both driven by it, so the set of
// accepted moves and the set of advertised moves cannot drift apart.
//
// Followup episode:
//   Questioner  followup(kind)         explanation -> followup
//   Explainer   explain(E2)            E2 = first edge of `kind` still open
//   Questioner  affirm_<kind>          followup -> explanation
// A followup never touches the topic stack: the intent topic under
// discussion stays the one opened by the question.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xp/error.hpp"
#include "xp/iff/iff.hpp"
#include "xp/protocol/moves.hpp"

namespace xp::protocol {

enum class Phase { kIdle, kInQuestion, kInExplanation, kInFollowup, kInArgument, kEnded };
std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

enum class AtomicDialogueKind { kExplanation, kArgumentation, kFollowup };
std::string_view to_string(AtomicDialogueKind kind);

// Progress inside the current phase. Explanation and followup dialogues wait
// for the explainer's explain before the questioner may continue; the
// argumentation stub waits for the challenge.
enum class Stage { kNone, kAwaitingExplain, kExplained, kAwaitingChallenge, kChallenged };

struct TransitionRule {
  Phase phase;
  Stage stage;
  AgentRole agent;
  MoveKind move;
  Phase next;
  AtomicDialogueKind dialogue;
};

const std::vector<TransitionRule>& transition_table();

struct AtomicDialogueSpec {
  AtomicDialogueKind kind;
  std::set<MoveKind> permitted_locutions;
  std::vector<TransitionRule> combination_rules;
  std::set<MoveKind> termination_moves;
  // Proposition template recorded in the commitment store, e.g.
  // "explained:<question>:<type>".
  std::map<MoveKind, std::string> commitment_effects;
};

AtomicDialogueSpec dialogue_spec(AtomicDialogueKind kind);

struct Commitment {
  AgentRole agent;
  std::string proposition;

  bool operator==(const Commitment&) const = default;
};

struct HistoryEntry {
  AgentRole agent;
  Move move;
  // Topic under discussion when the move was made. Moves that open a topic
  // carry the new one, end_explanation carries the one it closes.
  Topic topic;

  bool operator==(const HistoryEntry&) const = default;
};

struct FollowupEpisode {
  iff::FollowupKind kind;
  std::size_t edge_index;  // into the active question's followups
  std::string type_id;
  bool explained = false;

  bool operator==(const FollowupEpisode&) const = default;
};

struct DialogueState {
  std::string session_id;
  std::shared_ptr<const iff::IffGraph> view;  // graph restricted to user_group
  std::string user_group;
  bool followups_enabled = false;

  Phase phase = Phase::kIdle;
  std::vector<Topic> topic_stack;
  std::optional<std::string> active_question;
  iff::TypeIdSet delivered_types;  // for active_question
  bool recommended_delivered = false;
  std::optional<FollowupEpisode> followup;
  bool argument_challenged = false;

  std::vector<Commitment> commitments;  // append-only
  std::vector<HistoryEntry> history;

  const iff::UserQuestion* active() const;

  // Compares the graph view by value, not by pointer.
  bool operator==(const DialogueState& other) const;
};

using LegalMove = std::pair<AgentRole, Move>;

class ProtocolError : public Error {
 public:
  ProtocolError(Phase phase, AgentRole agent, std::optional<Move> move,
                std::vector<LegalMove> expected, const std::string& message)
      : Error(ErrorCode::kProtocolError, message),
        phase_(phase), agent_(agent), move_(std::move(move)), expected_(std::move(expected)) {}

  Phase phase() const { return phase_; }
  AgentRole agent() const { return agent_; }
  const std::optional<Move>& move() const { return move_; }
  const std::vector<LegalMove>& expected() const { return expected_; }

 private:
  Phase phase_;
  AgentRole agent_;
  std::optional<Move> move_;
  std::vector<LegalMove> expected_;
};

// Throws kUnknownUserGroup when user_group has no persona filter.
DialogueState new_session(std::shared_ptr<const iff::IffGraph> graph, std::string_view user_group,
                          bool followups_enabled, std::string session_id = {});
DialogueState new_session(const iff::IffGraph& graph, std::string_view user_group,
                          bool followups_enabled, std::string session_id = {});

Stage stage_of(const DialogueState& state);

// Every (agent, move) apply_move accepts, sorted. Question and type
// parameters are expanded against the view; a challenge appears once with
// empty text and stands for any text.
std::vector<LegalMove> legal_moves(const DialogueState& state);

bool is_legal(const DialogueState& state, AgentRole agent, const Move& move);

// Pure transition. Illegal moves throw ProtocolError and leave the input
// untouched; the error lists legal_moves(state).
DialogueState apply_move(const DialogueState& state, AgentRole agent, const Move& move);

// Questioner acknowledges the followup explanation of the open episode.
DialogueState affirm(const DialogueState& state, iff::FollowupKind kind);

// Closes the conversation. Only allowed between questions (phase Idle).
DialogueState end_dialogue(const DialogueState& state);

struct TranscriptEntry {
  AgentRole agent;
  Move move;
  Topic topic;

  bool operator==(const TranscriptEntry&) const = default;
};

std::vector<TranscriptEntry> transcript(const DialogueState& state);

// Canonical JSON snapshot of the full state, used for replay comparisons.
nlohmann::json state_to_json(const DialogueState& state);

std::string to_string(const LegalMove& move);

}  // namespace xp::protocol
