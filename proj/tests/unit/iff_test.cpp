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

#include <algorithm>
#include <set>
#include <tuple>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "xp/error.hpp"
#include "xp/iff/iff.hpp"

namespace xp::iff {
namespace {

using nlohmann::json;
using testing::loan_graph;

json loan_doc() { return json::parse(testing::read_file(testing::data_path("iff/loan_approval.iff.json"))); }

ErrorCode parse_error(const json& doc) {
  try {
    parse_iff(doc.dump());
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "document parsed";
  return ErrorCode::kIoError;
}

TEST(IffParse, LoanGraphHasSixQuestionsOverThreeIntents) {
  const auto& g = *loan_graph();
  EXPECT_EQ(g.questions.size(), 6u);
  std::set<Intent> intents;
  for (const auto& q : g.questions) {
    intents.insert(q.intent);
    EXPECT_FALSE(q.followups.empty()) << q.id;
    EXPECT_EQ(q.recommended.size(), 1u) << q.id;
  }
  EXPECT_EQ(intents.size(), 3u);
  EXPECT_EQ(g.intents.size(), 3u);
}

TEST(IffParse, EmptyQuestionListParsesAndWarns) {
  auto doc = loan_doc();
  doc["questions"] = json::array();
  doc["intents"] = json::array();
  doc["persona_filters"] = json::object();
  const auto g = parse_iff(doc.dump());
  EXPECT_TRUE(g.questions.empty());
  const auto report = validate_iff(g);
  EXPECT_TRUE(report.ok);
  EXPECT_TRUE(report.has("NO_QUESTIONS"));
}

TEST(IffParse, UnknownRecommendedTypeIsDangling) {
  auto doc = loan_doc();
  doc["questions"][0]["recommended"] = "shapx";
  EXPECT_EQ(parse_error(doc), ErrorCode::kDanglingReference);
}

TEST(IffParse, UnknownTechniqueIsDangling) {
  auto doc = loan_doc();
  doc["explanation_types"][1]["techniques"] = json::array({"lime"});
  EXPECT_EQ(parse_error(doc), ErrorCode::kDanglingReference);
}

TEST(IffParse, UnknownFieldIsSchemaError) {
  auto doc = loan_doc();
  doc["questions"][0]["colour"] = "blue";
  EXPECT_EQ(parse_error(doc), ErrorCode::kSchemaError);
}

TEST(IffParse, BadIntentIsSchemaError) {
  auto doc = loan_doc();
  doc["questions"][0]["intent"] = "curiosity";
  EXPECT_EQ(parse_error(doc), ErrorCode::kSchemaError);
}

TEST(IffParse, DuplicateQuestionId) {
  auto doc = loan_doc();
  doc["questions"].push_back(doc["questions"][0]);
  EXPECT_EQ(parse_error(doc), ErrorCode::kDuplicateId);
}

TEST(IffParse, MalformedJsonIsSchemaError) {
  EXPECT_THROW(
      {
        try {
          parse_iff("{not json");
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
          throw;
        }
      },
      Error);
}

TEST(IffParse, SerializeRoundTrips) {
  const auto& g = *loan_graph();
  EXPECT_EQ(parse_iff(serialize_iff(g)), g);
  EXPECT_EQ(serialize_iff(parse_iff(serialize_iff(g))), serialize_iff(g));
}

TEST(IffValidate, LoanGraphIsClean) {
  const auto report = validate_iff(*loan_graph());
  EXPECT_TRUE(report.ok);
  EXPECT_EQ(report.error_count(), 0u);
  EXPECT_EQ(report.warning_count(), 0u);
}

TEST(IffValidate, SampleBankGraphIsClean) {
  const auto report = validate_iff(*testing::bank_graph());
  EXPECT_TRUE(report.ok) << report_to_json(report).dump();
  std::set<Intent> intents;
  for (const auto& q : testing::bank_graph()->questions) intents.insert(q.intent);
  EXPECT_EQ(intents.size(), kAllIntents.size());
}

TEST(IffValidate, TwoRecommendedTypes) {
  auto doc = loan_doc();
  doc["questions"][0]["recommended"] = json::array({"feature_attribution", "anchor"});
  const auto report = validate_iff(parse_iff(doc.dump()));
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(report.has("RECOMMENDED_NOT_UNIQUE"));
}

TEST(IffValidate, TypeCycle) {
  auto doc = loan_doc();
  // feature_attribution -> explanation -> feature_attribution
  for (auto& t : doc["explanation_types"]) {
    if (t["id"] == "explanation") t["parent"] = "feature_attribution";
  }
  const auto report = validate_iff(parse_iff(doc.dump()));
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(report.has("TYPE_CYCLE"));
}

TEST(IffValidate, DuplicateFollowupAndEmptyPersona) {
  auto doc = loan_doc();
  doc["questions"][0]["followups"].push_back(doc["questions"][0]["followups"][0]);
  doc["persona_filters"]["auditor"] = json::array();
  const auto report = validate_iff(parse_iff(doc.dump()));
  EXPECT_TRUE(report.has("DUPLICATE_FOLLOWUP"));
  EXPECT_TRUE(report.has("EMPTY_PERSONA_FILTER"));
}

TEST(IffValidate, DeclaredIntentWithoutQuestion) {
  auto doc = loan_doc();
  doc["intents"].push_back("debugging");
  const auto report = validate_iff(parse_iff(doc.dump()));
  EXPECT_TRUE(report.has("INTENT_WITHOUT_QUESTION"));
}

TEST(IffValidate, FindingsAreSorted) {
  auto doc = loan_doc();
  doc["questions"][0]["recommended"] = json::array({"feature_attribution", "anchor"});
  doc["questions"][1]["followups"].push_back(doc["questions"][1]["followups"][0]);
  doc["intents"].push_back("debugging");
  const auto report = validate_iff(parse_iff(doc.dump()));
  for (std::size_t i = 1; i < report.findings.size(); ++i) {
    const auto& a = report.findings[i - 1];
    const auto& b = report.findings[i];
    EXPECT_LE(std::tie(a.location, a.code, a.message), std::tie(b.location, b.code, b.message));
  }
}

TEST(IffView, LoanApplicantSeesAllSixQuestions) {
  const auto view = select_view(*loan_graph(), "loan_applicant");
  EXPECT_EQ(view.questions.size(), 6u);
  EXPECT_EQ(view.persona_filters.size(), 1u);
  EXPECT_TRUE(validate_iff(view).ok);
}

TEST(IffView, FullGroupKeepsGraphModuloPruning) {
  const auto& g = *loan_graph();
  const auto view = select_view(g, "loan_applicant");
  EXPECT_EQ(view.questions, g.questions);
  for (const auto& t : view.type_forest) EXPECT_NE(g.find_type(t.id), nullptr);
  // Parent-only types nobody references are pruned unless an ancestor.
  for (const auto& t : view.type_forest) {
    bool referenced = false;
    for (const auto& q : view.questions) {
      referenced = referenced || q.recommended_type() == t.id;
      for (const auto& e : q.followups) referenced = referenced || e.type_id == t.id;
    }
    bool ancestor = false;
    for (const auto& u : view.type_forest) ancestor = ancestor || (u.parent && *u.parent == t.id);
    EXPECT_TRUE(referenced || ancestor) << t.id;
  }
}

TEST(IffView, UnknownGroup) {
  try {
    select_view(*loan_graph(), "auditor");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownUserGroup);
  }
}

TEST(IffView, BankPersonasSplitQuestions) {
  const auto& g = *testing::bank_graph();
  std::size_t total = 0;
  for (const auto& [group, ids] : g.persona_filters) {
    const auto view = select_view(g, group);
    EXPECT_EQ(view.questions.size(), ids.size()) << group;
    total += view.questions.size();
  }
  EXPECT_GE(total, g.questions.size());
}

TEST(IffFollowups, CounterfactualValidatedByNeighbours) {
  const auto edges = followups_of(*loan_graph(), "how_to_change", {});
  const FollowupEdge validation{"nearest_neighbour", FollowupKind::kValidation};
  EXPECT_NE(std::find(edges.begin(), edges.end(), validation), edges.end());
  const auto* q = loan_graph()->find_question("how_to_change");
  EXPECT_EQ(edges, q->followups);
}

TEST(IffFollowups, EmptyFollowupList) {
  auto doc = loan_doc();
  doc["questions"][0]["followups"] = json::array();
  const auto g = parse_iff(doc.dump());
  EXPECT_TRUE(followups_of(g, "why_outcome", {}).empty());
}

TEST(IffFollowups, EdgeBackToRecommendedTypeSurvives) {
  // why_outcome: recommended feature_attribution, validation edge to the same type.
  const auto edges = followups_of(*loan_graph(), "why_outcome", {"feature_attribution"});
  const FollowupEdge same{"feature_attribution", FollowupKind::kValidation};
  EXPECT_NE(std::find(edges.begin(), edges.end(), same), edges.end());
}

TEST(IffFollowups, SeenNonRecommendedTypeIsDropped) {
  const auto edges = followups_of(*loan_graph(), "why_outcome", {"textual_explanation", "feature_attribution"});
  for (const auto& e : edges) EXPECT_NE(e.type_id, "textual_explanation");
  EXPECT_EQ(select_followup_edge(*loan_graph()->find_question("why_outcome"), {"textual_explanation"},
                                 FollowupKind::kComplement),
            std::nullopt);
}

TEST(IffFollowups, UnknownQuestion) {
  try {
    followups_of(*loan_graph(), "nope", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownQuestion);
  }
}

TEST(IffTypes, NamesRoundTrip) {
  for (auto i : kAllIntents) EXPECT_EQ(parse_intent(to_string(i)), i);
  for (auto t : kAllTargets) EXPECT_EQ(parse_question_target(to_string(t)), t);
  for (auto k : kAllFollowupKinds) EXPECT_EQ(parse_followup_kind(to_string(k)), k);
  EXPECT_EQ(parse_intent("Transparency"), std::nullopt);
  EXPECT_TRUE(is_identifier("a_1"));
  EXPECT_FALSE(is_identifier("1a"));
  EXPECT_FALSE(is_identifier("A"));
  EXPECT_FALSE(is_identifier(""));
}

}  // namespace
}  // namespace xp::iff
