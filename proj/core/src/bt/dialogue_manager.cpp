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

#include "xp/bt/dialogue_manager.hpp"

#include <algorithm>
#include <string_view>
#include <utility>

#include "xp/error.hpp"
#include "xp/explain/techniques.hpp"
#include "xp/rng.hpp"

namespace xp::bt {

using nlohmann::json;
using protocol::AgentRole;
using protocol::DialogueState;
using protocol::Move;
using protocol::MoveKind;
using protocol::Phase;
using protocol::Topic;
using session::SessionAction;

namespace {

constexpr std::string_view kState = "dialogue.state";
constexpr std::string_view kInput = "dialogue.input";
constexpr std::string_view kOutbox = "dialogue.outbox";
constexpr std::string_view kEvents = "dialogue.events";
constexpr std::string_view kTick = "dialogue.tick";
constexpr std::string_view kApplyFailures = "dialogue.apply_failures";
constexpr std::string_view kArtifacts = "dialogue.artifacts";
constexpr std::string_view kArtifactSeq = "dialogue.artifact_seq";
constexpr std::string_view kRecommended = "dialogue.recommended";
constexpr std::string_view kMenu = "dialogue.menu";
constexpr std::string_view kGroup = "persona.group";
constexpr std::string_view kTargetRow = "target.row";
constexpr std::string_view kTargetInstance = "target.instance";
constexpr std::string_view kTargetScore = "target.score";
constexpr std::string_view kEvalQueue = "eval.queue";
constexpr std::string_view kEvalResponses = "eval.responses";
constexpr std::string_view kEvalFreeText = "eval.free_text";

using ArtifactMap = std::map<std::string, explain::ExplanationArtifact>;

std::pair<std::string_view, std::string_view> split_argument(std::string_view arg) {
  auto colon = arg.rfind(':');
  if (colon == std::string_view::npos) return {arg, {}};
  return {arg.substr(0, colon), arg.substr(colon + 1)};
}

std::size_t parse_index(std::string_view text) {
  std::size_t value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw Error(ErrorCode::kHandlerError, "bad edge index '" + std::string(text) + "'");
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

DialogueState& dstate(Blackboard& bb) { return bb.get<DialogueState>(kState); }

Topic current_topic(const Blackboard& bb) {
  const auto* st = bb.find<DialogueState>(kState);
  if (!st || st->topic_stack.empty()) return Topic::explanation_target();
  return st->topic_stack.back();
}

void emit(Blackboard& bb, std::string type, json payload) {
  bb.get<std::vector<OutMessage>>(kOutbox).push_back({std::move(type), std::move(payload)});
}

void log_event(Blackboard& bb, AgentRole agent, session::EventMove move, Topic topic,
               std::optional<std::string> artifact = std::nullopt) {
  bb.get<std::vector<EventDraft>>(kEvents).push_back(
      {agent, std::move(move), std::move(topic), std::move(artifact)});
}

std::optional<UserInput> take_input(Blackboard& bb) {
  auto* in = bb.find<UserInput>(kInput);
  if (!in) return std::nullopt;
  UserInput out = std::move(*in);
  bb.erase(kInput);
  return out;
}

// Applies a move the handler has already checked or generated itself. A
// rejection here is a manager bug: it is counted and surfaces as a failed
// action.
void apply(Blackboard& bb, AgentRole agent, const Move& move,
           std::optional<std::string> artifact = std::nullopt) {
  auto& st = dstate(bb);
  if (!protocol::is_legal(st, agent, move)) {
    ++bb.get<std::uint64_t>(kApplyFailures);
    throw Error(ErrorCode::kHandlerError,
                "handler produced illegal move " + protocol::to_string(move) + " in phase " +
                    std::string(protocol::to_string(st.phase)));
  }
  st = protocol::apply_move(st, agent, move);
  log_event(bb, agent, move, st.history.back().topic, std::move(artifact));
}

json client_message(std::string_view type, json payload = json::object()) {
  return json{{"type", type}, {"payload", std::move(payload)}};
}

json option(std::string label, json send) {
  return json{{"label", std::move(label)}, {"send", std::move(send)}};
}

std::string_view followup_label(iff::FollowupKind kind) {
  switch (kind) {
    case iff::FollowupKind::kComplement: return "Tell me more";
    case iff::FollowupKind::kReplacement: return "Show me a different explanation";
    case iff::FollowupKind::kValidation: return "Double-check this";
  }
  return "";
}

json expected_moves(const DialogueState& st) {
  json out = json::array();
  for (const auto& [agent, move] : protocol::legal_moves(st)) {
    if (agent != AgentRole::kQuestioner) continue;
    out.push_back(protocol::to_json(move));
  }
  return out;
}

// Recoverable rejection of a user input. Repeats the options of the last
// menu so that the client can redraw it.
void reject(Blackboard& bb, std::string_view code, const std::string& message) {
  json payload{{"code", code}, {"message", message}};
  if (const auto* st = bb.find<DialogueState>(kState)) {
    payload["phase"] = std::string(protocol::to_string(st->phase));
    payload["expected"] = expected_moves(*st);
  } else {
    payload["phase"] = nullptr;
    payload["expected"] = json::array();
  }
  const auto* menu = bb.find<json>(kMenu);
  payload["options"] = menu ? *menu : json::array();
  emit(bb, "protocol_error", std::move(payload));
}

std::string store_artifact(Blackboard& bb, explain::ExplanationArtifact artifact) {
  auto& seq = bb.get<std::uint64_t>(kArtifactSeq);
  artifact.id = "art-" + std::to_string(++seq);
  // Annotations refer to the artifact they annotate by id, which only exists
  // now that the source artifact has been stored.
  std::string id = artifact.id;
  bb.get<ArtifactMap>(kArtifacts).emplace(id, std::move(artifact));
  return id;
}

json target_json(const Blackboard& bb, const explain::TabularDataset& data) {
  const auto& x = bb.get<explain::Instance>(kTargetInstance);
  const double score = bb.get<double>(kTargetScore);
  json features = json::array();
  for (std::size_t i = 0; i < data.feature_count(); ++i) {
    const auto& f = data.feature(i);
    features.push_back({{"name", f.name},
                        {"label", f.label()},
                        {"value", x[i]},
                        {"text", data.format_value(i, x[i])}});
  }
  json out{{"features", features},
           {"score", score},
           {"decision", explain::outcome_name(score >= 0.5 ? explain::kApproved : explain::kRejected)}};
  const auto* row = bb.find<std::size_t>(kTargetRow);
  out["row"] = row ? json(*row) : json(nullptr);
  return out;
}

json question_options(const DialogueState& st, bool returning) {
  json options = json::array();
  for (const auto& [agent, move] : protocol::legal_moves(st)) {
    if (agent != AgentRole::kQuestioner) continue;
    const bool wanted = returning ? move.kind == MoveKind::kReturnQuestion
                                  : move.kind == MoveKind::kBeginQuestion;
    if (!wanted) continue;
    const auto* q = st.view->find_question(move.question_id);
    json send = client_message("choose_question", {{"question", move.question_id}});
    auto opt = option(q->text, std::move(send));
    opt["question"] = q->id;
    opt["intent"] = std::string(iff::to_string(q->intent));
    options.push_back(std::move(opt));
  }
  return options;
}

void send_question_menu(Blackboard& bb, const explain::TabularDataset& data) {
  const auto& st = dstate(bb);
  json options = question_options(st, false);
  options.push_back(option("I have no more questions", client_message("questionnaire")));
  json payload{{"kind", "questions"},
               {"prompt", "What would you like to know about this decision?"},
               {"target", target_json(bb, data)},
               {"options", options}};
  bb.set(kMenu, options);
  emit(bb, "menu", std::move(payload));
}

// Menu shown while an explanation is open: other questions, followups (B),
// disagreement and closing the explanation. Every option maps to a
// questioner move that is legal right now.
void send_explanation_menu(Blackboard& bb) {
  const auto& st = dstate(bb);
  const auto* q = st.active();
  json options = question_options(st, true);
  json followups = json::array();
  for (const auto& [agent, move] : protocol::legal_moves(st)) {
    if (agent != AgentRole::kQuestioner) continue;
    if (move.kind == MoveKind::kFollowup) {
      auto opt = option(std::string(followup_label(move.followup)),
                        client_message("choose_followup",
                                       {{"kind", std::string(iff::to_string(move.followup))}}));
      opt["kind"] = std::string(iff::to_string(move.followup));
      followups.push_back(std::move(opt));
    } else if (move.kind == MoveKind::kBeginArgument) {
      options.push_back(option("I disagree with this explanation", client_message("begin_argument")));
    } else if (move.kind == MoveKind::kEndExplanation) {
      options.push_back(option("I am done with this question", client_message("end_explanation")));
    }
  }
  json all = followups;
  for (const auto& o : options) all.push_back(o);
  bb.set(kMenu, all);
  if (st.followups_enabled) {
    emit(bb, "followup_menu", {{"question", q->id}, {"followups", followups}, {"options", options}});
  } else {
    emit(bb, "menu", {{"kind", "explanation"}, {"question", q->id}, {"options", options}});
  }
}

void send_argument_prompt(Blackboard& bb) {
  const auto& st = dstate(bb);
  json options = json::array({option("Send", client_message("argue", {{"text", ""}}))});
  bb.set(kMenu, options);
  emit(bb, "menu", {{"kind", "argument"},
                    {"question", st.active()->id},
                    {"prompt", "What do you disagree with?"},
                    {"options", options}});
}

void send_artifact(Blackboard& bb, const std::string& id, const std::string& question,
                   std::optional<iff::FollowupKind> followup) {
  const auto& art = bb.get<ArtifactMap>(kArtifacts).at(id);
  if (const auto* text = std::get_if<explain::TextAnnotation>(&art.payload)) {
    json payload{{"artifact", explain::to_json(art)}, {"annotates", text->annotates}, {"question", question}};
    if (followup) payload["followup"] = std::string(iff::to_string(*followup));
    emit(bb, "annotation", std::move(payload));
    return;
  }
  json payload{{"artifact", explain::to_json(art)}, {"question", question}};
  if (followup) payload["followup"] = std::string(iff::to_string(*followup));
  emit(bb, "explanation", std::move(payload));
}

}  // namespace

std::string_view to_string(InputKind kind) {
  switch (kind) {
    case InputKind::kPersona: return "persona";
    case InputKind::kChooseQuestion: return "choose_question";
    case InputKind::kChooseFollowup: return "choose_followup";
    case InputKind::kEndExplanation: return "end_explanation";
    case InputKind::kBeginArgument: return "begin_argument";
    case InputKind::kArgue: return "argue";
    case InputKind::kOpenQuestionnaire: return "open_questionnaire";
    case InputKind::kQuestionnaire: return "questionnaire";
    case InputKind::kFreeText: return "free_text";
  }
  return "?";
}

std::unique_ptr<BtNode> build_tree(const iff::IffGraph& graph) {
  if (graph.questions.empty()) {
    throw Error(ErrorCode::kInvalidGraph, "graph has no questions; the strategy fallback would be empty");
  }
  auto report = iff::validate_iff(graph);
  if (!report.ok) {
    throw Error(ErrorCode::kInvalidGraph,
                "graph fails validation with " + std::to_string(report.error_count()) + " error(s)");
  }

  std::vector<std::unique_ptr<BtNode>> strategies;
  for (const auto& q : graph.questions) {
    std::vector<std::unique_ptr<BtNode>> steps;
    steps.push_back(BtNode::action("explain:" + q.id, "explain:" + q.id));
    steps.push_back(BtNode::action("auto_complement:" + q.id, "auto_complement:" + q.id));

    std::vector<std::unique_ptr<BtNode>> loop;
    loop.push_back(BtNode::action("await_followup:" + q.id, "await_followup:" + q.id));
    if (!q.followups.empty()) {
      std::vector<std::unique_ptr<BtNode>> explainers;
      for (std::size_t i = 0; i < q.followups.size(); ++i) {
        const std::string key = q.id + ":" + std::to_string(i);
        explainers.push_back(BtNode::guard("followup_edge:" + key, "followup_edge:" + key,
                                           BtNode::action("explain_followup:" + key, "explain_followup:" + key)));
      }
      loop.push_back(BtNode::fallback("followup_explainers:" + q.id, std::move(explainers)));
    }
    steps.push_back(BtNode::repeat("followups:" + q.id,
                                   BtNode::sequence("followup_round:" + q.id, std::move(loop))));

    strategies.push_back(BtNode::guard("strategy:" + q.id, "active_question:" + q.id,
                                       BtNode::sequence("strategy_steps:" + q.id, std::move(steps))));
  }

  std::vector<std::unique_ptr<BtNode>> need;
  need.push_back(BtNode::action("choose_question", "choose_question"));
  need.push_back(BtNode::fallback("explanation_strategy", std::move(strategies)));

  std::vector<std::unique_ptr<BtNode>> evaluation;
  evaluation.push_back(BtNode::action("questionnaire", "questionnaire"));
  evaluation.push_back(BtNode::action("free_text", "free_text"));

  std::vector<std::unique_ptr<BtNode>> root;
  root.push_back(BtNode::action("persona", "persona"));
  root.push_back(BtNode::action("explanation_target", "explanation_target"));
  root.push_back(BtNode::repeat("explanation_loop", BtNode::sequence("explanation_need", std::move(need))));
  root.push_back(BtNode::sequence("evaluation_strategy", std::move(evaluation)));
  return BtNode::sequence("root", std::move(root));
}

void enqueue_evaluation(Blackboard& bb, const std::string& question_id) {
  auto* queue = bb.find<std::vector<std::string>>(kEvalQueue);
  if (!queue) {
    bb.set(kEvalQueue, std::vector<std::string>{});
    queue = bb.find<std::vector<std::string>>(kEvalQueue);
  }
  std::string item = session::evaluation_item_id(question_id);
  if (std::find(queue->begin(), queue->end(), item) == queue->end()) queue->push_back(std::move(item));
}

DialogueManager::DialogueManager(std::shared_ptr<const iff::IffGraph> graph,
                                 std::shared_ptr<const explain::ExplainerContext> explainer,
                                 ManagerConfig config, std::string session_id)
    : graph_(std::move(graph)),
      explainer_(std::move(explainer)),
      config_(std::move(config)),
      session_id_(std::move(session_id)),
      tree_(build_tree(*graph_)),
      ticker_(registry_) {
  register_handlers();
  check_tree(*tree_, registry_);
  bb_.set(kOutbox, std::vector<OutMessage>{});
  bb_.set(kEvents, std::vector<EventDraft>{});
  bb_.set(kTick, std::uint64_t{0});
  bb_.set(kApplyFailures, std::uint64_t{0});
  bb_.set(kArtifacts, ArtifactMap{});
  bb_.set(kArtifactSeq, std::uint64_t{0});
  bb_.set(kEvalQueue, std::vector<std::string>{});
}

std::uint64_t DialogueManager::ticks() const { return bb_.get<std::uint64_t>(kTick); }

std::uint64_t DialogueManager::apply_failures() const { return bb_.get<std::uint64_t>(kApplyFailures); }

const DialogueState* DialogueManager::state() const { return bb_.find<DialogueState>(kState); }

const std::map<std::string, explain::ExplanationArtifact>& DialogueManager::artifacts() const {
  return bb_.get<ArtifactMap>(kArtifacts);
}

const std::vector<std::string>& DialogueManager::evaluation_queue() const {
  return bb_.get<std::vector<std::string>>(kEvalQueue);
}

std::vector<session::QuestionnaireItem> DialogueManager::questionnaire_items() const {
  std::vector<session::QuestionnaireItem> items = session::satisfaction_scale().items;
  for (const auto& item : evaluation_queue()) {
    const std::string qid = item.substr(item.find(':') + 1);
    const auto* q = graph_->find_question(qid);
    items.push_back({item, "How well was this question answered: \"" + (q ? q->text : qid) + "\""});
  }
  return items;
}

void DialogueManager::append_evaluation_node(const std::string& question_id) {
  BtNode* evaluation = tree_->find("evaluation_strategy");
  auto& children = evaluation->children;
  // Keep free_text last.
  children.insert(children.end() - 1,
                  BtNode::action("evaluation_question:" + question_id, "evaluation_question:" + question_id));
}

StepResult DialogueManager::step(std::optional<UserInput> input) {
  ++bb_.get<std::uint64_t>(kTick);
  StepResult result{BtStatus::kSuccess, {}, {}};
  if (complete_) {
    if (input) {
      reject(bb_, "session_complete", "the conversation has already finished");
      result.messages = std::move(bb_.get<std::vector<OutMessage>>(kOutbox));
      bb_.get<std::vector<OutMessage>>(kOutbox).clear();
    }
    return result;
  }

  if (input) bb_.set(kInput, std::move(*input));
  result.status = ticker_.tick(*tree_, bb_);
  if (auto left = take_input(bb_)) {
    reject(bb_, "unexpected_input", "'" + std::string(to_string(left->kind)) + "' is not available right now");
  }
  if (result.status == BtStatus::kFailure) {
    emit(bb_, "protocol_error",
         {{"code", "handler_error"},
          {"message", ticker_.last_error().value_or("the conversation could not continue")},
          {"phase", state() ? json(std::string(protocol::to_string(state()->phase))) : json(nullptr)},
          {"expected", json::array()},
          {"options", json::array()}});
  }
  if (result.status == BtStatus::kSuccess) complete_ = true;

  auto& outbox = bb_.get<std::vector<OutMessage>>(kOutbox);
  result.messages = std::move(outbox);
  outbox.clear();
  auto& events = bb_.get<std::vector<EventDraft>>(kEvents);
  result.events = std::move(events);
  events.clear();
  return result;
}

void DialogueManager::register_handlers() {
  auto& actions = registry_.actions;
  auto& conditions = registry_.conditions;

  conditions["active_question"] = [](const Blackboard& bb, std::string_view q) {
    const auto* st = bb.find<DialogueState>(kState);
    return st && st->active_question && *st->active_question == q;
  };
  conditions["followup_edge"] = [](const Blackboard& bb, std::string_view arg) {
    const auto* st = bb.find<DialogueState>(kState);
    if (!st || st->phase != Phase::kInFollowup || !st->followup) return false;
    auto [q, index] = split_argument(arg);
    return st->active_question && *st->active_question == q && st->followup->edge_index == parse_index(index);
  };

  // ---- persona ---------------------------------------------------------------
  auto select_persona = [this](Blackboard& bb, const std::string& group) {
    bb.set(kState, protocol::new_session(graph_, group, config_.followups_enabled, session_id_));
    bb.set(kGroup, group);
    log_event(bb, AgentRole::kQuestioner, SessionAction::kSelectPersona, current_topic(bb));
  };
  actions["persona"] = [this, select_persona](ActionCall& c) {
    if (!c.resumed && !config_.persona.empty()) {
      select_persona(c.bb, config_.persona);
      return BtStatus::kSuccess;
    }
    if (!c.resumed) {
      json options = json::array();
      for (const auto& [group, questions] : graph_->persona_filters) {
        auto opt = option(group, client_message("persona", {{"group", group}}));
        opt["group"] = group;
        options.push_back(std::move(opt));
      }
      c.bb.set(kMenu, options);
      emit(c.bb, "menu", {{"kind", "persona"},
                          {"prompt", "Which of these describes you best?"},
                          {"options", options}});
      return BtStatus::kRunning;
    }
    auto in = take_input(c.bb);
    if (!in) return BtStatus::kRunning;
    if (in->kind != InputKind::kPersona || !graph_->persona_filters.contains(in->persona)) {
      reject(c.bb, "protocol_error", "choose one of the listed user groups");
      return BtStatus::kRunning;
    }
    select_persona(c.bb, in->persona);
    return BtStatus::kSuccess;
  };

  // ---- explanation target ----------------------------------------------------
  actions["explanation_target"] = [this](ActionCall& c) {
    const auto& data = explainer_->data();
    explain::Instance x;
    switch (config_.target_mode) {
      case TargetMode::kRandomTestSample: {
        auto rows = explain::test_sample_rows(data);
        if (rows.empty()) throw Error(ErrorCode::kHandlerError, "dataset has no test samples");
        Rng rng(mix_seed(config_.seed, 0x7461726765));
        const std::size_t row = rows[rng.below(rows.size())];
        c.bb.set(kTargetRow, row);
        x = data.rows()[row];
        break;
      }
      case TargetMode::kRow:
        if (config_.target_row >= data.size()) {
          throw Error(ErrorCode::kInvalidInstance, "target row " + std::to_string(config_.target_row) + " out of range");
        }
        c.bb.set(kTargetRow, config_.target_row);
        x = data.rows()[config_.target_row];
        break;
      case TargetMode::kInstance:
        data.check_instance(config_.target_instance);
        x = config_.target_instance;
        break;
    }
    c.bb.set(kTargetScore, explainer_->model().score(x));
    c.bb.set(kTargetInstance, std::move(x));
    log_event(c.bb, AgentRole::kExplainer, SessionAction::kPresentTarget, current_topic(c.bb));
    return BtStatus::kSuccess;
  };

  // ---- question menu ---------------------------------------------------------
  actions["choose_question"] = [this](ActionCall& c) {
    auto& st = dstate(c.bb);
    if (!c.resumed) {
      // A return_question already opened the next question.
      if (st.phase == Phase::kInExplanation && !st.recommended_delivered) return BtStatus::kSuccess;
      send_question_menu(c.bb, explainer_->data());
      return BtStatus::kRunning;
    }
    auto in = take_input(c.bb);
    if (!in) return BtStatus::kRunning;
    if (in->kind == InputKind::kChooseQuestion) {
      const Move move = Move::begin_question(in->question_id);
      if (!protocol::is_legal(st, AgentRole::kQuestioner, move)) {
        reject(c.bb, "protocol_error", "unknown question '" + in->question_id + "'");
        return BtStatus::kRunning;
      }
      apply(c.bb, AgentRole::kQuestioner, move);
      const auto before = evaluation_queue().size();
      enqueue_evaluation(c.bb, in->question_id);
      if (evaluation_queue().size() != before) append_evaluation_node(in->question_id);
      return BtStatus::kSuccess;
    }
    if (in->kind == InputKind::kOpenQuestionnaire) {
      st = protocol::end_dialogue(st);
      log_event(c.bb, AgentRole::kQuestioner, SessionAction::kEndDialogue, current_topic(c.bb));
      return BtStatus::kFailure;
    }
    reject(c.bb, "protocol_error", "choose a question or finish the conversation");
    return BtStatus::kRunning;
  };

  // ---- recommended explanation -------------------------------------------------
  actions["explain"] = [this](ActionCall& c) {
    auto& st = dstate(c.bb);
    if (st.phase == Phase::kInQuestion) apply(c.bb, AgentRole::kExplainer, Move::begin_explanation());
    const auto* q = dstate(c.bb).active();
    const std::string type_id = q->recommended_type();
    const auto* type = dstate(c.bb).view->find_type(type_id);
    auto artifact = explainer_->generate(*type, c.bb.get<explain::Instance>(kTargetInstance));
    const std::string id = store_artifact(c.bb, std::move(artifact));
    apply(c.bb, AgentRole::kExplainer, Move::explain(type_id), id);
    c.bb.set(kRecommended, id);
    send_artifact(c.bb, id, q->id, std::nullopt);
    return BtStatus::kSuccess;
  };

  // Runs edge `index` of the active question inside an open followup episode
  // and closes it with the matching affirm.
  auto run_edge = [this](Blackboard& bb, std::size_t index) {
    const auto& st = dstate(bb);
    const auto* q = st.active();
    const auto& edge = q->followups.at(index);
    const auto& prior = bb.get<ArtifactMap>(kArtifacts).at(bb.get<std::string>(kRecommended));
    auto artifact = explain::run_followup_edge(*explainer_, *st.view, *q, index, prior,
                                               bb.get<explain::Instance>(kTargetInstance));
    if (auto* text = std::get_if<explain::TextAnnotation>(&artifact.payload)) text->annotates = prior.id;
    if (artifact.agreement) artifact.agreement->validates = prior.id;
    const std::string question = q->id;
    const auto kind = edge.kind;
    const std::string id = store_artifact(bb, std::move(artifact));
    apply(bb, AgentRole::kExplainer, Move::explain(edge.type_id), id);
    send_artifact(bb, id, question, kind);
    apply(bb, AgentRole::kQuestioner, Move::affirm(kind));
  };

  actions["auto_complement"] = [run_edge](ActionCall& c) {
    const auto& st = dstate(c.bb);
    if (!st.followups_enabled) return BtStatus::kSuccess;
    auto edge = iff::select_followup_edge(*st.active(), st.delivered_types, iff::FollowupKind::kComplement);
    if (!edge) return BtStatus::kSuccess;
    apply(c.bb, AgentRole::kQuestioner, Move::followup_on(iff::FollowupKind::kComplement));
    run_edge(c.bb, dstate(c.bb).followup->edge_index);
    return BtStatus::kSuccess;
  };

  // ---- followup menu -----------------------------------------------------------
  actions["await_followup"] = [this](ActionCall& c) {
    if (!c.resumed) {
      send_explanation_menu(c.bb);
      return BtStatus::kRunning;
    }
    auto in = take_input(c.bb);
    if (!in) return BtStatus::kRunning;
    const auto& st = dstate(c.bb);
    auto attempt = [&](const Move& move, std::string_view why) {
      if (protocol::is_legal(st, AgentRole::kQuestioner, move)) {
        apply(c.bb, AgentRole::kQuestioner, move);
        return true;
      }
      reject(c.bb, "protocol_error", std::string(why));
      return false;
    };
    switch (in->kind) {
      case InputKind::kChooseFollowup:
        return attempt(Move::followup_on(in->followup), "that followup is not available")
                   ? BtStatus::kSuccess
                   : BtStatus::kRunning;
      case InputKind::kChooseQuestion:
        if (!attempt(Move::return_question(in->question_id), "choose another listed question")) {
          return BtStatus::kRunning;
        }
        {
          const auto before = evaluation_queue().size();
          enqueue_evaluation(c.bb, in->question_id);
          if (evaluation_queue().size() != before) append_evaluation_node(in->question_id);
        }
        return BtStatus::kFailure;
      case InputKind::kEndExplanation:
        return attempt(Move::end_explanation(), "the explanation cannot be closed now") ? BtStatus::kFailure
                                                                                         : BtStatus::kRunning;
      case InputKind::kBeginArgument:
        if (attempt(Move::begin_argument(), "an argument cannot be started now")) send_argument_prompt(c.bb);
        return BtStatus::kRunning;
      case InputKind::kArgue:
        if (attempt(Move::challenge(in->text), "start an argument before sending one")) {
          apply(c.bb, AgentRole::kQuestioner, Move::end_argument());
          send_explanation_menu(c.bb);
        }
        return BtStatus::kRunning;
      default:
        reject(c.bb, "protocol_error", "'" + std::string(to_string(in->kind)) + "' is not available right now");
        return BtStatus::kRunning;
    }
  };

  actions["explain_followup"] = [run_edge](ActionCall& c) {
    auto [q, index] = split_argument(c.argument);
    (void)q;
    run_edge(c.bb, parse_index(index));
    return BtStatus::kSuccess;
  };

  // ---- evaluation ------------------------------------------------------------
  actions["questionnaire"] = [this](ActionCall& c) {
    if (!c.resumed) {
      if (dstate(c.bb).phase != Phase::kEnded) {
        throw Error(ErrorCode::kHandlerError, "questionnaire reached before the dialogue ended");
      }
      log_event(c.bb, AgentRole::kExplainer, SessionAction::kOpenQuestionnaire, current_topic(c.bb));
      json items = json::array();
      for (const auto& item : questionnaire_items()) items.push_back({{"id", item.id}, {"text", item.text}});
      c.bb.set(kMenu, json::array());
      emit(c.bb, "questionnaire", {{"items", items},
                                   {"scale", session::satisfaction_scale().scale},
                                   {"free_text_prompt", "Please describe your experience in at least 100 words."}});
      return BtStatus::kRunning;
    }
    auto in = take_input(c.bb);
    if (!in) return BtStatus::kRunning;
    if (in->kind != InputKind::kQuestionnaire && in->kind != InputKind::kOpenQuestionnaire) {
      reject(c.bb, "protocol_error", "answer the questionnaire first");
      return BtStatus::kRunning;
    }
    const auto items = questionnaire_items();
    const int scale = session::satisfaction_scale().scale;
    for (const auto& [id, value] : in->responses) {
      const bool known = std::any_of(items.begin(), items.end(), [&](const auto& it) { return it.id == id; });
      if (!known) {
        reject(c.bb, "schema_error", "unknown questionnaire item '" + id + "'");
        return BtStatus::kRunning;
      }
      if (value < 1 || value > scale) {
        reject(c.bb, "schema_error", "response to '" + id + "' must lie in 1.." + std::to_string(scale));
        return BtStatus::kRunning;
      }
    }
    for (const auto& item : items) {
      if (!in->responses.contains(item.id)) {
        reject(c.bb, "incomplete_questionnaire", "missing response to '" + item.id + "'");
        return BtStatus::kRunning;
      }
    }
    c.bb.set(kEvalResponses, in->responses);
    log_event(c.bb, AgentRole::kQuestioner, SessionAction::kAnswerQuestionnaire, current_topic(c.bb));
    return BtStatus::kSuccess;
  };

  actions["evaluation_question"] = [](ActionCall& c) {
    const auto* responses = c.bb.find<std::map<std::string, int>>(kEvalResponses);
    return responses && responses->contains(session::evaluation_item_id(c.argument)) ? BtStatus::kSuccess
                                                                                   : BtStatus::kFailure;
  };

  actions["free_text"] = [this](ActionCall& c) {
    if (!c.resumed) return BtStatus::kRunning;
    auto in = take_input(c.bb);
    if (!in) return BtStatus::kRunning;
    if (in->kind != InputKind::kFreeText) {
      reject(c.bb, "protocol_error", "send your free-text feedback to finish");
      return BtStatus::kRunning;
    }
    c.bb.set(kEvalFreeText, in->text);
    log_event(c.bb, AgentRole::kQuestioner, SessionAction::kSubmitFreeText, current_topic(c.bb));
    emit(c.bb, "bye", {{"session_id", session_id_}});
    return BtStatus::kSuccess;
  };
}

}  // namespace xp::bt
