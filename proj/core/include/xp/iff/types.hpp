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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xp::iff {

// Closed set of explanation intents.
enum class Intent { kEffectiveness, kActionability, kCompliance, kTransparency, kDebugging };
inline constexpr std::array<Intent, 5> kAllIntents = {
    Intent::kEffectiveness, Intent::kActionability, Intent::kCompliance,
    Intent::kTransparency, Intent::kDebugging};

// The aspect of the AI system a user question is about.
enum class QuestionTarget { kModel, kData, kOutput };
inline constexpr std::array<QuestionTarget, 3> kAllTargets = {
    QuestionTarget::kModel, QuestionTarget::kData, QuestionTarget::kOutput};

// How a secondary explanation relates to the one it follows up on.
enum class FollowupKind { kComplement, kReplacement, kValidation };
inline constexpr std::array<FollowupKind, 3> kAllFollowupKinds = {
    FollowupKind::kComplement, FollowupKind::kReplacement, FollowupKind::kValidation};

std::string_view to_string(Intent intent);
std::string_view to_string(QuestionTarget target);
std::string_view to_string(FollowupKind kind);

// Parsers accept the lowercase names produced by to_string and return
// nullopt for anything else.
std::optional<Intent> parse_intent(std::string_view text);
std::optional<QuestionTarget> parse_question_target(std::string_view text);
std::optional<FollowupKind> parse_followup_kind(std::string_view text);

// Lowercase snake-case ASCII: [a-z][a-z0-9_]*
bool is_identifier(std::string_view text);

struct ExplanationTypeNode {
  std::string id;
  std::string display_name;
  std::optional<std::string> parent;
  std::vector<std::string> technique_ids;

  bool operator==(const ExplanationTypeNode&) const = default;
};

struct FollowupEdge {
  std::string type_id;
  FollowupKind kind;

  bool operator==(const FollowupEdge&) const = default;
};

struct UserQuestion {
  std::string id;
  std::string text;
  Intent intent;
  QuestionTarget target;
  // A well-formed question has exactly one entry; the list form exists so
  // that curation drafts naming several candidates can be loaded and
  // reported by validation rather than rejected at parse time.
  std::vector<std::string> recommended;
  std::vector<FollowupEdge> followups;

  // The recommended explanation type. Requires a non-empty `recommended`.
  const std::string& recommended_type() const { return recommended.front(); }

  bool operator==(const UserQuestion&) const = default;
};

inline constexpr int kIffSchemaVersion = 1;

struct IffGraph {
  int schema_version = kIffSchemaVersion;
  std::string name;
  std::string description;
  // Intents the curators declared as in scope. Each one must be served by at
  // least one question.
  std::vector<Intent> intents;
  std::vector<ExplanationTypeNode> type_forest;
  std::vector<UserQuestion> questions;
  std::map<std::string, std::vector<std::string>> persona_filters;

  const UserQuestion* find_question(std::string_view id) const;
  const ExplanationTypeNode* find_type(std::string_view id) const;

  bool operator==(const IffGraph&) const = default;
};

enum class Severity { kError, kWarning };
std::string_view to_string(Severity severity);

struct Finding {
  Severity severity;
  std::string code;
  std::string message;
  std::string location;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Finding> findings;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool has(std::string_view code) const;
};

}  // namespace xp::iff
