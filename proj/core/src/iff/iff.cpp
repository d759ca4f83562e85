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

#include "xp/iff/iff.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "xp/error.hpp"
#include "xp/explain/suite.hpp"

namespace xp::iff {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(where, "unknown field '" + key + "'");
    }
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_string()) schema_error(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string require_identifier(const json& obj, const std::string& where, const char* key) {
  std::string id = require_string(obj, where, key);
  if (!is_identifier(id)) {
    schema_error(where, std::string("field '") + key + "' value '" + id +
                            "' is not a lowercase snake-case identifier");
  }
  return id;
}

std::string as_identifier(const json& v, const std::string& where) {
  if (!v.is_string()) schema_error(where, "expected an identifier string");
  std::string id = v.get<std::string>();
  if (!is_identifier(id)) schema_error(where, "'" + id + "' is not a lowercase snake-case identifier");
  return id;
}

const json& require_array(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_array()) schema_error(where, std::string("field '") + key + "' must be an array");
  return v;
}

[[noreturn]] void dangling(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kDanglingReference, where + ": " + what);
}

ExplanationTypeNode parse_type(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "explanation type must be an object");
  check_keys(j, where, {"id", "display_name", "parent", "techniques"});
  ExplanationTypeNode node;
  node.id = require_identifier(j, where, "id");
  node.display_name = require_string(j, where, "display_name");
  if (auto it = j.find("parent"); it != j.end() && !it->is_null()) {
    node.parent = as_identifier(*it, where + ".parent");
  }
  if (auto it = j.find("techniques"); it != j.end()) {
    if (!it->is_array()) schema_error(where, "field 'techniques' must be an array");
    for (const auto& t : *it) node.technique_ids.push_back(as_identifier(t, where + ".techniques"));
  }
  return node;
}

UserQuestion parse_question(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "question must be an object");
  check_keys(j, where, {"id", "text", "intent", "target", "recommended", "followups"});
  UserQuestion q;
  q.id = require_identifier(j, where, "id");
  q.text = require_string(j, where, "text");
  std::string intent = require_string(j, where, "intent");
  auto parsed_intent = parse_intent(intent);
  if (!parsed_intent) schema_error(where, "unknown intent '" + intent + "'");
  q.intent = *parsed_intent;
  std::string target = require_string(j, where, "target");
  auto parsed_target = parse_question_target(target);
  if (!parsed_target) schema_error(where, "unknown question target '" + target + "'");
  q.target = *parsed_target;

  const json& rec = require(j, where, "recommended");
  if (rec.is_string()) {
    q.recommended.push_back(as_identifier(rec, where + ".recommended"));
  } else if (rec.is_array()) {
    for (const auto& r : rec) q.recommended.push_back(as_identifier(r, where + ".recommended"));
  } else {
    schema_error(where, "field 'recommended' must be a type id or a list of type ids");
  }

  if (auto it = j.find("followups"); it != j.end()) {
    if (!it->is_array()) schema_error(where, "field 'followups' must be an array");
    std::size_t i = 0;
    for (const auto& f : *it) {
      std::string fw = where + ".followups[" + std::to_string(i++) + "]";
      if (!f.is_object()) schema_error(fw, "followup must be an object");
      check_keys(f, fw, {"type", "kind"});
      FollowupEdge edge;
      edge.type_id = require_identifier(f, fw, "type");
      std::string kind = require_string(f, fw, "kind");
      auto parsed_kind = parse_followup_kind(kind);
      if (!parsed_kind) schema_error(fw, "unknown followup kind '" + kind + "'");
      edge.kind = *parsed_kind;
      q.followups.push_back(std::move(edge));
    }
  }
  return q;
}

void resolve_references(const IffGraph& g, const TechniqueSet& techniques) {
  std::set<std::string, std::less<>> type_ids;
  for (const auto& t : g.type_forest) {
    if (!type_ids.insert(t.id).second) {
      throw Error(ErrorCode::kDuplicateId, "explanation type id '" + t.id + "' is declared twice");
    }
  }
  std::set<std::string, std::less<>> question_ids;
  for (const auto& q : g.questions) {
    if (!question_ids.insert(q.id).second) {
      throw Error(ErrorCode::kDuplicateId, "question id '" + q.id + "' is declared twice");
    }
  }
  for (const auto& t : g.type_forest) {
    if (t.parent && !type_ids.contains(*t.parent)) {
      dangling("type " + t.id, "unknown parent type '" + *t.parent + "'");
    }
    for (const auto& tech : t.technique_ids) {
      if (!techniques.contains(tech)) dangling("type " + t.id, "unknown technique '" + tech + "'");
    }
  }
  for (const auto& q : g.questions) {
    for (const auto& r : q.recommended) {
      if (!type_ids.contains(r)) dangling("question " + q.id, "unknown explanation type '" + r + "'");
    }
    for (const auto& f : q.followups) {
      if (!type_ids.contains(f.type_id)) {
        dangling("question " + q.id, "unknown explanation type '" + f.type_id + "'");
      }
    }
  }
  for (const auto& [group, ids] : g.persona_filters) {
    for (const auto& id : ids) {
      if (!question_ids.contains(id)) dangling("persona " + group, "unknown question '" + id + "'");
    }
  }
}

// True when `start` itself lies on a cycle (as opposed to leading into one).
bool on_parent_cycle(const IffGraph& g, const ExplanationTypeNode& start) {
  const ExplanationTypeNode* node = &start;
  for (std::size_t steps = 0; steps <= g.type_forest.size(); ++steps) {
    if (!node->parent) return false;
    if (*node->parent == start.id) return true;
    node = g.find_type(*node->parent);
    if (!node) return false;
  }
  return false;
}

}  // namespace

IffGraph parse_iff(std::string_view document, const TechniqueSet& techniques) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaError, std::string("document is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) schema_error("document", "top level must be an object");
  check_keys(root, "document", {"schema_version", "name", "description", "intents",
                                "explanation_types", "questions", "persona_filters"});

  IffGraph g;
  const json& version = require(root, "document", "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kIffSchemaVersion) {
    schema_error("document", "unsupported schema_version (expected " +
                                 std::to_string(kIffSchemaVersion) + ")");
  }
  g.schema_version = version.get<int>();
  g.name = require_string(root, "document", "name");
  if (g.name.empty()) schema_error("document", "name must not be empty");
  if (auto it = root.find("description"); it != root.end()) {
    if (!it->is_string()) schema_error("document", "field 'description' must be a string");
    g.description = it->get<std::string>();
  }
  if (auto it = root.find("intents"); it != root.end()) {
    if (!it->is_array()) schema_error("document", "field 'intents' must be an array");
    for (const auto& i : *it) {
      if (!i.is_string()) schema_error("intents", "intent must be a string");
      auto intent = parse_intent(i.get<std::string>());
      if (!intent) schema_error("intents", "unknown intent '" + i.get<std::string>() + "'");
      g.intents.push_back(*intent);
    }
  }

  const json& types = require_array(root, "document", "explanation_types");
  for (std::size_t i = 0; i < types.size(); ++i) {
    g.type_forest.push_back(parse_type(types[i], "explanation_types[" + std::to_string(i) + "]"));
  }
  const json& questions = require_array(root, "document", "questions");
  for (std::size_t i = 0; i < questions.size(); ++i) {
    g.questions.push_back(parse_question(questions[i], "questions[" + std::to_string(i) + "]"));
  }
  if (auto it = root.find("persona_filters"); it != root.end()) {
    if (!it->is_object()) schema_error("document", "field 'persona_filters' must be an object");
    for (const auto& [group, ids] : it->items()) {
      std::string where = "persona_filters." + group;
      if (!is_identifier(group)) schema_error(where, "user group name is not a snake-case identifier");
      if (!ids.is_array()) schema_error(where, "must be an array of question ids");
      std::vector<std::string> list;
      for (const auto& id : ids) list.push_back(as_identifier(id, where));
      g.persona_filters.emplace(group, std::move(list));
    }
  }

  resolve_references(g, techniques);
  return g;
}

IffGraph parse_iff(std::string_view document) {
  return parse_iff(document, explain::technique_catalog());
}

IffGraph load_iff_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_iff(buf.str());
}

std::string serialize_iff(const IffGraph& g) {
  ordered_json root;
  root["schema_version"] = g.schema_version;
  root["name"] = g.name;
  if (!g.description.empty()) root["description"] = g.description;
  if (!g.intents.empty()) {
    ordered_json intents = ordered_json::array();
    for (Intent i : g.intents) intents.push_back(std::string(to_string(i)));
    root["intents"] = std::move(intents);
  }
  ordered_json types = ordered_json::array();
  for (const auto& t : g.type_forest) {
    ordered_json jt;
    jt["id"] = t.id;
    jt["display_name"] = t.display_name;
    if (t.parent) jt["parent"] = *t.parent;
    jt["techniques"] = t.technique_ids;
    types.push_back(std::move(jt));
  }
  root["explanation_types"] = std::move(types);
  ordered_json questions = ordered_json::array();
  for (const auto& q : g.questions) {
    ordered_json jq;
    jq["id"] = q.id;
    jq["text"] = q.text;
    jq["intent"] = std::string(to_string(q.intent));
    jq["target"] = std::string(to_string(q.target));
    if (q.recommended.size() == 1) {
      jq["recommended"] = q.recommended.front();
    } else {
      jq["recommended"] = q.recommended;
    }
    ordered_json followups = ordered_json::array();
    for (const auto& f : q.followups) {
      followups.push_back({{"type", f.type_id}, {"kind", std::string(to_string(f.kind))}});
    }
    jq["followups"] = std::move(followups);
    questions.push_back(std::move(jq));
  }
  root["questions"] = std::move(questions);
  ordered_json personas = ordered_json::object();
  for (const auto& [group, ids] : g.persona_filters) personas[group] = ids;
  root["persona_filters"] = std::move(personas);
  return root.dump(2) + "\n";
}

ValidationReport validate_iff(const IffGraph& g, const TechniqueSet& techniques) {
  ValidationReport report;
  auto add = [&](Severity s, std::string code, std::string location, std::string message) {
    report.findings.push_back({s, std::move(code), std::move(message), std::move(location)});
  };
  const auto kError = Severity::kError;
  const auto kWarning = Severity::kWarning;

  if (g.schema_version != kIffSchemaVersion) {
    add(kError, "SCHEMA_VERSION", "graph", "unsupported schema version");
  }
  if (g.questions.empty()) add(kWarning, "NO_QUESTIONS", "graph", "graph has no user questions");

  std::map<std::string, int, std::less<>> type_counts;
  for (const auto& t : g.type_forest) ++type_counts[t.id];
  std::map<std::string, int, std::less<>> question_counts;
  for (const auto& q : g.questions) ++question_counts[q.id];

  std::set<std::string, std::less<>> referenced_types;
  for (const auto& t : g.type_forest) {
    const std::string loc = "type:" + t.id;
    if (!is_identifier(t.id)) add(kError, "INVALID_IDENTIFIER", loc, "type id is not snake-case");
    if (type_counts[t.id] > 1 && &t == g.find_type(t.id)) {
      add(kError, "DUPLICATE_ID", loc, "type id declared more than once");
    }
    if (t.parent && !type_counts.contains(*t.parent)) {
      add(kError, "DANGLING_TYPE", loc, "unknown parent '" + *t.parent + "'");
    }
    if (on_parent_cycle(g, t)) {
      add(kError, "TYPE_CYCLE", loc, "type lies on a parent cycle");
    }
    for (const auto& tech : t.technique_ids) {
      if (!techniques.contains(tech)) {
        add(kError, "DANGLING_TECHNIQUE", loc, "unknown technique '" + tech + "'");
      }
    }
  }

  std::set<Intent> used_intents;
  for (const auto& q : g.questions) {
    const std::string loc = "question:" + q.id;
    used_intents.insert(q.intent);
    if (!is_identifier(q.id)) add(kError, "INVALID_IDENTIFIER", loc, "question id is not snake-case");
    if (question_counts[q.id] > 1 && &q == g.find_question(q.id)) {
      add(kError, "DUPLICATE_ID", loc, "question id declared more than once");
    }
    if (q.recommended.empty()) {
      add(kError, "RECOMMENDED_MISSING", loc, "question has no recommended explanation type");
    } else if (q.recommended.size() > 1) {
      add(kError, "RECOMMENDED_NOT_UNIQUE", loc,
          "question lists " + std::to_string(q.recommended.size()) + " recommended types");
    }
    for (const auto& r : q.recommended) {
      referenced_types.insert(r);
      if (!type_counts.contains(r)) add(kError, "DANGLING_TYPE", loc, "unknown type '" + r + "'");
    }
    std::set<std::pair<std::string, FollowupKind>> seen_edges;
    for (const auto& f : q.followups) {
      referenced_types.insert(f.type_id);
      if (!type_counts.contains(f.type_id)) {
        add(kError, "DANGLING_TYPE", loc, "unknown followup type '" + f.type_id + "'");
      }
      if (!seen_edges.emplace(f.type_id, f.kind).second) {
        add(kError, "DUPLICATE_FOLLOWUP", loc,
            "followup (" + f.type_id + ", " + std::string(to_string(f.kind)) + ") repeated");
      }
    }
  }

  for (const auto& id : referenced_types) {
    const ExplanationTypeNode* t = g.find_type(id);
    if (t && t->technique_ids.empty()) {
      add(kWarning, "TYPE_NOT_EXECUTABLE", "type:" + id,
          "referenced type has no technique to generate it");
    }
  }

  for (Intent i : g.intents) {
    if (!used_intents.contains(i)) {
      add(kError, "INTENT_WITHOUT_QUESTION", "graph",
          "declared intent '" + std::string(to_string(i)) + "' has no question");
    }
  }

  for (const auto& [group, ids] : g.persona_filters) {
    const std::string loc = "persona:" + group;
    if (ids.empty()) add(kError, "EMPTY_PERSONA_FILTER", loc, "user group selects no questions");
    std::set<std::string, std::less<>> seen;
    for (const auto& id : ids) {
      if (!question_counts.contains(id)) {
        add(kError, "DANGLING_QUESTION", loc, "unknown question '" + id + "'");
      }
      if (!seen.insert(id).second) {
        add(kError, "DUPLICATE_ID", loc, "question '" + id + "' listed twice");
      }
    }
  }

  std::sort(report.findings.begin(), report.findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.location, a.code, a.message) < std::tie(b.location, b.code, b.message);
  });
  report.ok = report.error_count() == 0;
  return report;
}

ValidationReport validate_iff(const IffGraph& graph) {
  return validate_iff(graph, explain::technique_catalog());
}

json report_to_json(const ValidationReport& report) {
  json findings = json::array();
  for (const auto& f : report.findings) {
    findings.push_back({{"severity", std::string(to_string(f.severity))},
                        {"code", f.code},
                        {"location", f.location},
                        {"message", f.message}});
  }
  return {{"ok", report.ok},
          {"errors", report.error_count()},
          {"warnings", report.warning_count()},
          {"findings", std::move(findings)}};
}

IffGraph select_view(const IffGraph& g, std::string_view user_group) {
  auto it = g.persona_filters.find(std::string(user_group));
  if (it == g.persona_filters.end()) {
    throw Error(ErrorCode::kUnknownUserGroup, "unknown user group '" + std::string(user_group) + "'");
  }
  const std::set<std::string, std::less<>> keep(it->second.begin(), it->second.end());

  IffGraph view;
  view.schema_version = g.schema_version;
  view.name = g.name;
  view.description = g.description;
  std::set<std::string, std::less<>> reachable;
  std::set<Intent> intents;
  for (const auto& q : g.questions) {
    if (!keep.contains(q.id)) continue;
    view.questions.push_back(q);
    intents.insert(q.intent);
    for (const auto& r : q.recommended) reachable.insert(r);
    for (const auto& f : q.followups) reachable.insert(f.type_id);
  }
  // Close over ancestors; bounded so that a malformed cyclic forest cannot
  // spin forever.
  std::vector<std::string> frontier(reachable.begin(), reachable.end());
  while (!frontier.empty()) {
    std::string id = std::move(frontier.back());
    frontier.pop_back();
    const ExplanationTypeNode* t = g.find_type(id);
    if (t && t->parent && reachable.insert(*t->parent).second) frontier.push_back(*t->parent);
  }
  for (const auto& t : g.type_forest) {
    if (reachable.contains(t.id)) view.type_forest.push_back(t);
  }
  for (Intent i : g.intents) {
    if (intents.contains(i)) view.intents.push_back(i);
  }
  view.persona_filters.emplace(it->first, it->second);
  return view;
}

std::vector<FollowupEdge> followups_of(const IffGraph& g, std::string_view question_id,
                                       const TypeIdSet& already_seen) {
  const UserQuestion* q = g.find_question(question_id);
  if (!q) throw Error(ErrorCode::kUnknownQuestion, "unknown question '" + std::string(question_id) + "'");
  std::vector<FollowupEdge> out;
  for (const auto& edge : q->followups) {
    bool seen = already_seen.contains(edge.type_id);
    bool is_recommended = !q->recommended.empty() && edge.type_id == q->recommended_type();
    if (!seen || is_recommended) out.push_back(edge);
  }
  return out;
}

std::optional<std::size_t> select_followup_edge(const UserQuestion& q, const TypeIdSet& already_seen,
                                                FollowupKind kind) {
  for (std::size_t i = 0; i < q.followups.size(); ++i) {
    const auto& edge = q.followups[i];
    if (edge.kind != kind) continue;
    bool seen = already_seen.contains(edge.type_id);
    bool is_recommended = !q.recommended.empty() && edge.type_id == q.recommended_type();
    if (!seen || is_recommended) return i;
  }
  return std::nullopt;
}

}  // namespace xp::iff
