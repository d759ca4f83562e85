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

#include "xp/iff/types.hpp"

#include <algorithm>

namespace xp::iff {

std::string_view to_string(Intent intent) {
  switch (intent) {
    case Intent::kEffectiveness: return "effectiveness";
    case Intent::kActionability: return "actionability";
    case Intent::kCompliance: return "compliance";
    case Intent::kTransparency: return "transparency";
    case Intent::kDebugging: return "debugging";
  }
  return "?";
}

std::string_view to_string(QuestionTarget target) {
  switch (target) {
    case QuestionTarget::kModel: return "model";
    case QuestionTarget::kData: return "data";
    case QuestionTarget::kOutput: return "output";
  }
  return "?";
}

std::string_view to_string(FollowupKind kind) {
  switch (kind) {
    case FollowupKind::kComplement: return "complement";
    case FollowupKind::kReplacement: return "replacement";
    case FollowupKind::kValidation: return "validation";
  }
  return "?";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

std::optional<Intent> parse_intent(std::string_view text) {
  for (Intent i : kAllIntents) {
    if (to_string(i) == text) return i;
  }
  return std::nullopt;
}

std::optional<QuestionTarget> parse_question_target(std::string_view text) {
  for (QuestionTarget t : kAllTargets) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::optional<FollowupKind> parse_followup_kind(std::string_view text) {
  for (FollowupKind k : kAllFollowupKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

bool is_identifier(std::string_view text) {
  if (text.empty() || text.front() < 'a' || text.front() > 'z') return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

const UserQuestion* IffGraph::find_question(std::string_view id) const {
  for (const auto& q : questions) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

const ExplanationTypeNode* IffGraph::find_type(std::string_view id) const {
  for (const auto& t : type_forest) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::size_t ValidationReport::error_count() const {
  return std::count_if(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.severity == Severity::kError; });
}

std::size_t ValidationReport::warning_count() const {
  return findings.size() - error_count();
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const Finding& f) { return f.code == code; });
}

}  // namespace xp::iff
