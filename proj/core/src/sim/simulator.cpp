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

#include "xp/sim/simulator.hpp"

#include <algorithm>
#include <set>

#include "xp/error.hpp"
#include "xp/rng.hpp"
#include "xp/session/wire.hpp"

namespace xp::sim {

using nlohmann::json;

Step Step::ask(std::string question, std::int64_t think_ms) {
  Step s;
  s.kind = StepKind::kAsk;
  s.question = std::move(question);
  s.think_ms = think_ms;
  return s;
}

Step Step::follow(iff::FollowupKind kind, std::int64_t think_ms) {
  Step s;
  s.kind = StepKind::kFollowup;
  s.followup = kind;
  s.think_ms = think_ms;
  return s;
}

Step Step::end_explanation(std::int64_t think_ms) {
  Step s;
  s.kind = StepKind::kEndExplanation;
  s.think_ms = think_ms;
  return s;
}

Step Step::argue(std::string text, std::int64_t think_ms) {
  Step s;
  s.kind = StepKind::kArgue;
  s.text = std::move(text);
  s.think_ms = think_ms;
  return s;
}

Step Step::finish(std::int64_t think_ms) {
  Step s;
  s.kind = StepKind::kFinish;
  s.think_ms = think_ms;
  return s;
}

Script without_followups(const Script& script) {
  Script out = script;
  std::erase_if(out.steps, [](const Step& s) { return s.kind == StepKind::kFollowup; });
  return out;
}

Simulator::Simulator(session::ServiceConfig config, std::shared_ptr<session::SessionStore> store,
                     std::int64_t start_ms)
    : clock_(std::make_shared<std::int64_t>(start_ms)) {
  config.clock = [clock = clock_] { return *clock; };
  service_ = std::make_unique<session::SessionService>(std::move(config), std::move(store));
}

namespace {

// Conversation state as the simulated client sees it.
struct Client {
  Client(session::SessionService& s, RunResult& r) : service(s), result(r) {}

  session::SessionService& service;
  RunResult& result;
  json options = json::array();
  json questionnaire;  // last questionnaire payload

  void receive(const std::vector<json>& messages) {
    for (const auto& m : messages) {
      result.received.push_back(m);
      const std::string type = m.at("type");
      const json& p = m.at("payload");
      if (type == "menu") {
        options = p.at("options");
      } else if (type == "followup_menu") {
        options = p.at("followups");
        for (const auto& o : p.at("options")) options.push_back(o);
      } else if (type == "protocol_error") {
        ++result.protocol_errors;
        if (!p.at("options").empty()) options = p.at("options");
      } else if (type == "questionnaire") {
        questionnaire = p;
        options = json::array();
      }
    }
  }

  // The offered message matching `pred`, if any.
  template <typename Pred>
  std::optional<json> offered(Pred pred) const {
    for (const auto& o : options) {
      if (pred(o.at("send"))) return std::optional<json>(std::in_place, o.at("send"));
    }
    return std::nullopt;
  }

  void send(json message, bool from_menu) {
    if (!from_menu) result.mirrored_menus = false;
    message["proto_version"] = session::kProtoVersion;
    result.sent.push_back(message);
    receive(service.handle_client_message(result.session_id, message));
  }
};

bool has_type(const json& send, std::string_view type) { return send.at("type") == type; }

}  // namespace

RunResult Simulator::run(const Script& script, session::Group group) {
  RunResult result;
  result.group = group;
  auto started = service_->start_session(script.participant, session::Assignment::force(group));
  result.session_id = started.session_id;
  Client client(*service_, result);
  client.receive(started.messages);

  std::vector<Step> steps = script.steps;
  if (steps.empty() || steps.back().kind != StepKind::kFinish) steps.push_back(Step::finish(0));

  for (const auto& step : steps) {
    if (!client.questionnaire.is_null()) break;
    std::optional<json> msg;
    switch (step.kind) {
      case StepKind::kAsk:
        msg = client.offered([&](const json& s) {
          return has_type(s, "choose_question") && s.at("payload").value("question", "") == step.question;
        });
        break;
      case StepKind::kFollowup:
        msg = client.offered([&](const json& s) {
          return has_type(s, "choose_followup") &&
                 s.at("payload").value("kind", "") == iff::to_string(step.followup);
        });
        break;
      case StepKind::kEndExplanation:
        msg = client.offered([](const json& s) { return has_type(s, "end_explanation"); });
        break;
      case StepKind::kArgue: {
        auto begin = client.offered([](const json& s) { return has_type(s, "begin_argument"); });
        if (!begin) break;
        *clock_ += step.think_ms;
        client.send(*begin, true);
        msg = client.offered([](const json& s) { return has_type(s, "argue"); });
        if (msg) (*msg)["payload"]["text"] = step.text;
        break;
      }
      case StepKind::kFinish: {
        // Close an open explanation first; the questionnaire is offered
        // between questions only.
        if (auto end = client.offered([](const json& s) { return has_type(s, "end_explanation"); })) {
          client.send(*end, true);
        }
        msg = client.offered([](const json& s) { return has_type(s, "questionnaire"); });
        break;
      }
    }
    if (!msg) {
      ++result.skipped_steps;
      continue;
    }
    if (step.kind != StepKind::kArgue) *clock_ += step.think_ms;
    client.send(*msg, true);
  }

  if (!client.questionnaire.is_null()) {
    json responses = json::object();
    for (const auto& item : client.questionnaire.at("items")) {
      const std::string id = item.at("id");
      auto it = script.answers.find(id);
      responses[id] = it != script.answers.end() ? it->second : script.default_answer;
    }
    *clock_ += script.questionnaire_ms;
    client.send(session::client_envelope("questionnaire", {{"responses", responses}}), true);
    *clock_ += script.free_text_ms;
    client.send(session::client_envelope("free_text", {{"text", script.free_text}}), true);
  }
  result.record = service_->record(result.session_id);
  // Sessions are spaced out so that their time ranges never overlap.
  *clock_ += 3600000;
  return result;
}

Script random_script(const iff::IffGraph& graph, std::uint64_t seed, std::size_t index) {
  Rng rng(mix_seed(seed, index));
  auto seconds = [&](int lo, int hi) {
    return static_cast<std::int64_t>(lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)))) * 1000;
  };

  std::vector<const iff::UserQuestion*> pool;
  for (const auto& q : graph.questions) pool.push_back(&q);
  // Fisher-Yates with the script's own stream.
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);

  const std::size_t wanted = std::min<std::size_t>(pool.size(), 2 + rng.below(3));
  std::vector<const iff::UserQuestion*> chosen;
  std::set<iff::Intent> intents;
  // Second intent first, so that two intents are covered whenever possible.
  for (const auto* q : pool) {
    if (chosen.empty() || (intents.size() < 2 && !intents.contains(q->intent))) {
      chosen.push_back(q);
      intents.insert(q->intent);
    }
    if (intents.size() >= 2) break;
  }
  for (const auto* q : pool) {
    if (chosen.size() >= wanted) break;
    if (std::find(chosen.begin(), chosen.end(), q) == chosen.end()) chosen.push_back(q);
  }

  Script script;
  script.participant = "sim-" + std::to_string(index);
  for (const auto* q : chosen) {
    script.steps.push_back(Step::ask(q->id, seconds(5, 25)));
    std::vector<iff::FollowupKind> kinds;
    for (const auto& e : q->followups) {
      if (e.kind != iff::FollowupKind::kComplement &&
          std::find(kinds.begin(), kinds.end(), e.kind) == kinds.end()) {
        kinds.push_back(e.kind);
      }
    }
    const std::size_t n = kinds.empty() ? 0 : rng.below(std::min<std::size_t>(kinds.size(), 2) + 1);
    for (std::size_t k = 0; k < n; ++k) script.steps.push_back(Step::follow(kinds[k], seconds(15, 60)));
    script.steps.push_back(Step::end_explanation(seconds(30, 120)));
  }
  script.steps.push_back(Step::finish(seconds(3, 15)));
  for (const auto& item : session::satisfaction_scale().items) {
    script.answers[item.id] = 1 + static_cast<int>(rng.below(5));
  }
  script.questionnaire_ms = seconds(40, 120);
  script.free_text_ms = seconds(60, 300);
  script.free_text = "I explored " + std::to_string(chosen.size()) + " questions about the decision.";
  return script;
}

PairedCohort run_paired_cohort(Simulator& simulator, const iff::IffGraph& graph, std::size_t sessions,
                               std::uint64_t seed) {
  PairedCohort out;
  for (std::size_t i = 0; i < sessions; ++i) {
    Script with = random_script(graph, seed, i);
    Script base = without_followups(with);
    base.participant += "-a";
    with.participant += "-b";
    out.a.push_back(simulator.run(base, session::Group::kA));
    out.b.push_back(simulator.run(with, session::Group::kB));
  }
  return out;
}

}  // namespace xp::sim
