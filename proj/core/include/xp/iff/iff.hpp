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

// Loading, checking and querying intent fulfilment graphs: intents, the
// user questions that express them, the explanation types that answer each
// question and the followup edges between those types.
//
// The on-disk form is the `*.iff.json` document described in
// docs/iff_format.md.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xp/iff/types.hpp"

namespace xp::iff {

using TechniqueSet = std::set<std::string, std::less<>>;
using TypeIdSet = std::set<std::string, std::less<>>;

// Parses a document and resolves every cross reference against the type
// forest, the question list and `techniques`.
//
// Throws xp::Error with kSchemaError (malformed document, unknown field,
// badly formed identifier), kDanglingReference (unknown type, technique or
// question id) or kDuplicateId.
//
// Structural problems that a curator can still load and inspect (several
// recommended types, parent cycles, duplicate followups, empty persona
// filters) are left to validate_iff.
IffGraph parse_iff(std::string_view document, const TechniqueSet& techniques);

// Same as above, resolving techniques against the built-in explainer library.
IffGraph parse_iff(std::string_view document);

IffGraph load_iff_file(const std::filesystem::path& path);

// Canonical pretty-printed JSON. parse_iff(serialize_iff(g)) == g.
std::string serialize_iff(const IffGraph& graph);

// Lists every invariant violation. Findings are sorted by location, then
// code, then message.
ValidationReport validate_iff(const IffGraph& graph, const TechniqueSet& techniques);
ValidationReport validate_iff(const IffGraph& graph);

// {"ok", "errors", "warnings", "findings": [{"severity", "code", "location", "message"}]}
nlohmann::json report_to_json(const ValidationReport& report);

// Restricts the graph to the questions of one user group. The type forest is
// pruned to the types the kept questions reference plus their ancestors, and
// persona_filters keeps only `user_group`.
//
// Throws kUnknownUserGroup.
IffGraph select_view(const IffGraph& graph, std::string_view user_group);

// Followup edges of a question that remain available once the types in
// `already_seen` have been shown. An edge towards an already shown type is
// kept only when it points back at the recommended type, since repeating
// the recommended type with a different technique is a legitimate followup.
// Configuration order is preserved.
//
// Throws kUnknownQuestion.
std::vector<FollowupEdge> followups_of(const IffGraph& graph, std::string_view question_id,
                                       const TypeIdSet& already_seen);

// Index into question.followups of the first available edge of `kind`.
std::optional<std::size_t> select_followup_edge(const UserQuestion& question,
                                                const TypeIdSet& already_seen,
                                                FollowupKind kind);

}  // namespace xp::iff
