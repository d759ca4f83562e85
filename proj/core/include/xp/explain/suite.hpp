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

// The explainer library as seen by the dialogue: a catalogue of named
// techniques and a context that runs them for configured explanation types
// and followup edges.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xp/explain/artifact.hpp"
#include "xp/explain/dataset.hpp"
#include "xp/explain/model.hpp"
#include "xp/iff/iff.hpp"

namespace xp::explain {

struct TechniqueInfo {
  std::string_view id;
  PayloadKind payload;
};

// kernel_shap, exact_shapley, grid_counterfactual, gower_knn, greedy_anchor,
// histogram_stats, template_nlg.
const std::vector<TechniqueInfo>& techniques();
iff::TechniqueSet technique_catalog();
std::optional<PayloadKind> technique_payload(std::string_view technique);

struct ExplainerConfig {
  std::size_t attribution_samples = 128;  // kernel_shap coalitions
  std::size_t neighbours_k = 5;
  std::size_t grid_levels = 8;
  std::size_t max_changes = 2;
  double anchor_threshold = 0.9;
  std::size_t anchor_samples = 400;
  std::string stats_feature = "int_rate";  // first feature when absent
  std::uint64_t seed = 42;
};

class ExplainerContext {
 public:
  ExplainerContext(std::shared_ptr<const TabularDataset> data, std::shared_ptr<const Model> model,
                   ExplainerConfig config = {});

  const TabularDataset& data() const { return *data_; }
  const Model& model() const { return *model_; }
  const ExplainerConfig& config() const { return config_; }
  const Instance& baseline() const { return baseline_; }

  // Runs one catalogue technique on x. `variant` perturbs the seed.
  // Throws kDanglingReference for an unknown technique and
  // kUnsupportedPayload for template_nlg, which needs a prior artifact.
  ExplanationArtifact run_technique(std::string_view technique, const Instance& x,
                                    std::uint64_t variant = 0) const;

  // Artifact for a configured type using its first technique; type_id is
  // set to type.id.
  ExplanationArtifact generate(const iff::ExplanationTypeNode& type, const Instance& x) const;

  // Counterfactual that leaves `frozen` features untouched.
  ExplanationArtifact counterfactual_excluding(const Instance& x, const std::vector<std::string>& frozen) const;

 private:
  std::shared_ptr<const TabularDataset> data_;
  std::shared_ptr<const Model> model_;
  ExplainerConfig config_;
  Instance baseline_;
};

// Secondary explanation for the followup edge question.followups[edge].
//   complement   text annotation of `prior` when the edge type is textual,
//                otherwise the edge type as a supplement
//   replacement  the edge type; when it equals prior's type, a different
//                technique or a change set avoiding prior's features
//   validation   the edge type plus an agreement score against `prior`
// Throws kUnknownFollowupEdge when edge is out of range.
ExplanationArtifact run_followup_edge(const ExplainerContext& ctx, const iff::IffGraph& graph,
                                      const iff::UserQuestion& question, std::size_t edge,
                                      const ExplanationArtifact& prior, const Instance& x);

// Same, choosing the first edge of `kind` still open after `already_seen`.
ExplanationArtifact run_followup(const ExplainerContext& ctx, const iff::IffGraph& graph,
                                 const iff::UserQuestion& question, iff::FollowupKind kind,
                                 const ExplanationArtifact& prior, const Instance& x,
                                 const iff::TypeIdSet& already_seen = {});

}  // namespace xp::explain
