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

// Scripted users driving a SessionService through its wire messages on a
// simulated clock. A simulated user only ever sends a message that the last
// menu offered; a scripted step whose option is missing is skipped.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xp/session/service.hpp"

namespace xp::sim {

enum class StepKind { kAsk, kFollowup, kEndExplanation, kArgue, kFinish };

struct Step {
  StepKind kind = StepKind::kAsk;
  std::string question;                                     // kAsk
  iff::FollowupKind followup = iff::FollowupKind::kComplement;  // kFollowup
  std::string text;                                         // kArgue
  std::int64_t think_ms = 0;  // simulated time before the message is sent

  static Step ask(std::string question, std::int64_t think_ms);
  static Step follow(iff::FollowupKind kind, std::int64_t think_ms);
  static Step end_explanation(std::int64_t think_ms);
  static Step argue(std::string text, std::int64_t think_ms);
  static Step finish(std::int64_t think_ms);
};

struct Script {
  std::string participant = "sim";
  std::vector<Step> steps;  // a missing trailing kFinish is implied
  std::map<std::string, int> answers;  // by questionnaire item id
  int default_answer = 4;
  std::int64_t questionnaire_ms = 60000;
  std::string free_text = "Simulated feedback.";
  std::int64_t free_text_ms = 120000;
};

// The same script without its followup steps.
Script without_followups(const Script& script);

struct RunResult {
  std::string session_id;
  session::Group group = session::Group::kA;
  std::vector<nlohmann::json> sent;      // client envelopes
  std::vector<nlohmann::json> received;  // server envelopes
  std::size_t skipped_steps = 0;
  std::size_t protocol_errors = 0;
  // True when every sent message matched an option of the preceding menu.
  bool mirrored_menus = true;
  session::SessionRecord record;
};

class Simulator {
 public:
  // config.clock is replaced by the simulated clock.
  Simulator(session::ServiceConfig config, std::shared_ptr<session::SessionStore> store,
            std::int64_t start_ms = 1790000000000);

  RunResult run(const Script& script, session::Group group);

  session::SessionService& service() { return *service_; }
  std::int64_t now() const { return *clock_; }
  void advance(std::int64_t ms) { *clock_ += ms; }

 private:
  std::shared_ptr<std::int64_t> clock_;
  std::unique_ptr<session::SessionService> service_;
};

// Deterministic random script for participant `index`: two to four
// questions from at least two intents when the graph offers them, zero to
// two followups per question, think times in whole seconds.
Script random_script(const iff::IffGraph& graph, std::uint64_t seed, std::size_t index);

struct PairedCohort {
  std::vector<RunResult> a;  // scripts without followups
  std::vector<RunResult> b;  // same scripts with followups
};

PairedCohort run_paired_cohort(Simulator& simulator, const iff::IffGraph& graph, std::size_t sessions,
                               std::uint64_t seed);

}  // namespace xp::sim
