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

#include "xp/explain/suite.hpp"

#include <algorithm>

#include "xp/error.hpp"
#include "xp/explain/techniques.hpp"
#include "xp/rng.hpp"

namespace xp::explain {

namespace {

const std::vector<TechniqueInfo> kTechniques = {
    {"kernel_shap", PayloadKind::kFeatureAttribution},
    {"exact_shapley", PayloadKind::kFeatureAttribution},
    {"grid_counterfactual", PayloadKind::kCounterfactual},
    {"gower_knn", PayloadKind::kNeighbours},
    {"greedy_anchor", PayloadKind::kAnchorRule},
    {"histogram_stats", PayloadKind::kDatasetStats},
    {"template_nlg", PayloadKind::kTextAnnotation},
};

const iff::ExplanationTypeNode& edge_type(const iff::IffGraph& graph, const std::string& id) {
  const auto* t = graph.find_type(id);
  if (!t) throw Error(ErrorCode::kDanglingReference, "unknown explanation type '" + id + "'");
  return *t;
}

bool offers(const iff::ExplanationTypeNode& type, std::string_view technique) {
  return std::find(type.technique_ids.begin(), type.technique_ids.end(), technique) != type.technique_ids.end();
}

bool textual(const iff::ExplanationTypeNode& type) { return offers(type, "template_nlg"); }

// First technique of `type` other than `avoid`, if any.
std::optional<std::string> other_technique(const iff::ExplanationTypeNode& type, const std::string& avoid) {
  for (const auto& t : type.technique_ids) {
    if (t != avoid) return t;
  }
  return std::nullopt;
}

std::optional<Agreement> agreement_for(const ExplainerContext& ctx, const ExplanationArtifact& prior,
                                       const ExplanationArtifact& check, const Instance& x) {
  const auto* attr_prior = std::get_if<FeatureAttribution>(&prior.payload);
  const auto* attr_check = std::get_if<FeatureAttribution>(&check.payload);
  if (attr_prior && attr_check) {
    return Agreement{"kendall_concordance", kendall_concordance(*attr_prior, *attr_check), prior.id};
  }
  // An anchor checked by neighbours, or neighbours checked by an anchor.
  const auto* nn = std::get_if<Neighbours>(&check.payload);
  const auto* rule = std::get_if<AnchorRule>(&prior.payload);
  if (!nn) {
    nn = std::get_if<Neighbours>(&prior.payload);
    rule = std::get_if<AnchorRule>(&check.payload);
    if (!rule) return std::nullopt;
  }
  if (!nn || nn->neighbours.empty()) return std::nullopt;
  const auto k = static_cast<double>(nn->neighbours.size());

  if (const auto* cf = std::get_if<Counterfactual>(&prior.payload)) {
    const int label = ctx.model().predict(cf->point);
    double same = 0;
    for (const auto& n : nn->neighbours) same += n.label == label ? 1 : 0;
    return Agreement{"neighbour_consistency", same / k, prior.id};
  }
  if (rule) {
    // Neighbours inside the rule; all neighbours when none fall inside.
    double inside = 0, kept = 0;
    for (const auto& n : nn->neighbours) {
      const Instance& row = ctx.data().rows()[n.row];
      if (!rule->holds(row)) continue;
      inside += 1;
      kept += ctx.model().predict(row) == rule->prediction ? 1 : 0;
    }
    if (inside == 0) {
      for (const auto& n : nn->neighbours) kept += ctx.model().predict(ctx.data().rows()[n.row]) == rule->prediction ? 1 : 0;
      inside = k;
    }
    return Agreement{"anchor_precision", kept / inside, prior.id};
  }
  const int label = ctx.model().predict(x);
  double same = 0;
  for (const auto& n : nn->neighbours) same += n.label == label ? 1 : 0;
  return Agreement{"label_consistency", same / k, prior.id};
}

}  // namespace

const std::vector<TechniqueInfo>& techniques() { return kTechniques; }

iff::TechniqueSet technique_catalog() {
  iff::TechniqueSet out;
  for (const auto& t : kTechniques) out.emplace(t.id);
  return out;
}

std::optional<PayloadKind> technique_payload(std::string_view technique) {
  for (const auto& t : kTechniques) {
    if (t.id == technique) return t.payload;
  }
  return std::nullopt;
}

ExplainerContext::ExplainerContext(std::shared_ptr<const TabularDataset> data,
                                   std::shared_ptr<const Model> model, ExplainerConfig config)
    : data_(std::move(data)), model_(std::move(model)), config_(std::move(config)) {
  baseline_ = data_->baseline();
}

ExplanationArtifact ExplainerContext::run_technique(std::string_view technique, const Instance& x,
                                                    std::uint64_t variant) const {
  const std::uint64_t seed = variant == 0 ? config_.seed : mix_seed(config_.seed, variant);
  ExplanationArtifact a;
  if (technique == "kernel_shap") {
    a = feature_attribution(*model_, *data_, x, baseline_, config_.attribution_samples, seed);
  } else if (technique == "exact_shapley") {
    data_->check_instance(x);
    a.type_id = "feature_attribution";
    a.payload = exact_shapley(*model_, *data_, x, baseline_);
    a.provenance.technique = "exact_shapley";
    a.provenance.parameters = {{"baseline", baseline_}, {"exact", true}};
    a.provenance.seed = seed;
  } else if (technique == "grid_counterfactual") {
    CounterfactualOptions opts;
    opts.max_changes = config_.max_changes;
    a = counterfactual(*model_, *data_, x, make_grid(*data_, config_.grid_levels), opts);
    a.provenance.seed = seed;
  } else if (technique == "gower_knn") {
    a = nearest_neighbours(*data_, x, std::min(config_.neighbours_k, data_->size()));
    a.provenance.seed = seed;
  } else if (technique == "greedy_anchor") {
    AnchorOptions opts;
    opts.precision_threshold = config_.anchor_threshold;
    opts.n_samples = config_.anchor_samples;
    opts.seed = seed;
    a = anchor_rule(*model_, *data_, x, opts);
  } else if (technique == "histogram_stats") {
    auto feature = data_->find_feature(config_.stats_feature).value_or(0);
    a = dataset_stats(*data_, data_->feature(feature).name);
    a.provenance.seed = seed;
  } else if (technique == "template_nlg") {
    throw Error(ErrorCode::kUnsupportedPayload, "template_nlg annotates an existing artifact");
  } else {
    throw Error(ErrorCode::kDanglingReference, "unknown technique '" + std::string(technique) + "'");
  }
  return a;
}

ExplanationArtifact ExplainerContext::generate(const iff::ExplanationTypeNode& type, const Instance& x) const {
  if (type.technique_ids.empty()) {
    throw Error(ErrorCode::kUnsupportedPayload, "type '" + type.id + "' has no technique");
  }
  ExplanationArtifact a = run_technique(type.technique_ids.front(), x);
  a.type_id = type.id;
  return a;
}

ExplanationArtifact ExplainerContext::counterfactual_excluding(const Instance& x,
                                                               const std::vector<std::string>& frozen) const {
  CounterfactualGrid grid = make_grid(*data_, config_.grid_levels);
  for (const auto& name : frozen) {
    const std::size_t j = data_->feature_index(name);
    grid[j] = {x[j]};
  }
  CounterfactualOptions opts;
  opts.max_changes = config_.max_changes;
  ExplanationArtifact a = counterfactual(*model_, *data_, x, grid, opts);
  a.provenance.parameters["frozen"] = frozen;
  a.provenance.seed = config_.seed;
  return a;
}

ExplanationArtifact run_followup_edge(const ExplainerContext& ctx, const iff::IffGraph& graph,
                                      const iff::UserQuestion& question, std::size_t edge,
                                      const ExplanationArtifact& prior, const Instance& x) {
  if (edge >= question.followups.size()) {
    throw Error(ErrorCode::kUnknownFollowupEdge, "question '" + question.id + "' has no followup edge " +
                                                     std::to_string(edge));
  }
  const iff::FollowupEdge& e = question.followups[edge];
  const iff::ExplanationTypeNode& type = edge_type(graph, e.type_id);
  ExplanationArtifact out;

  switch (e.kind) {
    case iff::FollowupKind::kComplement:
      out = textual(type) ? annotate(prior, ctx.data(), x) : ctx.generate(type, x);
      break;
    case iff::FollowupKind::kReplacement:
      if (type.id != prior.type_id) {
        out = textual(type) ? annotate(prior, ctx.data(), x) : ctx.generate(type, x);
      } else if (auto alt = other_technique(type, prior.provenance.technique)) {
        out = ctx.run_technique(*alt, x);
      } else if (const auto* cf = std::get_if<Counterfactual>(&prior.payload); cf && !cf->changes.empty()) {
        std::vector<std::string> frozen;
        for (const auto& c : cf->changes) frozen.push_back(c.feature);
        try {
          out = ctx.counterfactual_excluding(x, frozen);
        } catch (const Error& err) {
          if (err.code() != ErrorCode::kNoCounterfactualFound) throw;
          out = ctx.run_technique(type.technique_ids.front(), x, 1);
        }
      } else {
        out = ctx.run_technique(type.technique_ids.front(), x, 1);
      }
      break;
    case iff::FollowupKind::kValidation: {
      const auto* cf = std::get_if<Counterfactual>(&prior.payload);
      if (type.id == prior.type_id) {
        auto alt = other_technique(type, prior.provenance.technique);
        out = ctx.run_technique(alt ? *alt : type.technique_ids.front(), x, alt ? 0 : 1);
      } else if (cf && technique_payload(type.technique_ids.front()) == PayloadKind::kNeighbours) {
        out = ctx.run_technique(type.technique_ids.front(), cf->point);
      } else {
        out = textual(type) ? annotate(prior, ctx.data(), x) : ctx.generate(type, x);
      }
      out.agreement = agreement_for(ctx, prior, out, x);
      break;
    }
  }
  out.type_id = type.id;
  out.provenance.parameters["followup"] = {{"kind", std::string(iff::to_string(e.kind))},
                                           {"question", question.id},
                                           {"prior", prior.id}};
  return out;
}

ExplanationArtifact run_followup(const ExplainerContext& ctx, const iff::IffGraph& graph,
                                 const iff::UserQuestion& question, iff::FollowupKind kind,
                                 const ExplanationArtifact& prior, const Instance& x,
                                 const iff::TypeIdSet& already_seen) {
  auto edge = iff::select_followup_edge(question, already_seen, kind);
  if (!edge) {
    throw Error(ErrorCode::kUnknownFollowupEdge, "question '" + question.id + "' has no open " +
                                                     std::string(iff::to_string(kind)) + " followup");
  }
  return run_followup_edge(ctx, graph, question, *edge, prior, x);
}

}  // namespace xp::explain
