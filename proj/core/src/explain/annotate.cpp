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
#include <cmath>
#include <cstdio>
#include <numeric>

#include "xp/error.hpp"
#include "xp/explain/techniques.hpp"

namespace xp::explain {

namespace {

std::string technique_phrase(const std::string& technique) {
  if (technique == "kernel_shap") return "a sampled Kernel SHAP estimate";
  if (technique == "exact_shapley") return "exact Shapley values over all feature combinations";
  if (technique == "grid_counterfactual") return "a search over alternative feature values";
  if (technique == "gower_knn") return "a similarity search over past applications";
  if (technique == "greedy_anchor") return "an anchor rule search around this application";
  if (technique == "histogram_stats") return "summary statistics of the training data";
  return "the explanation library";
}

std::string money(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", std::abs(v));
  return buf;
}

std::string plural(std::size_t n, const char* one, const char* many) {
  return std::to_string(n) + " " + (n == 1 ? one : many);
}

std::string join_and(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += i + 1 == parts.size() ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

std::string capitalise(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string describe(const FeatureAttribution& p, const TabularDataset& data) {
  std::vector<std::size_t> order(p.weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::abs(p.weights[l].weight) > std::abs(p.weights[r].weight);
  });
  auto name = [&](std::size_t i) {
    auto j = data.find_feature(p.weights[i].feature);
    return j ? data.feature(*j).label() : p.weights[i].feature;
  };
  if (order.empty() || p.weights[order[0]].weight == 0.0) {
    return "None of the features moved the approval score away from that of a typical application.";
  }
  const auto& top = p.weights[order[0]];
  std::string text = "The " + name(order[0]) + " contributed most to this decision, " +
                     (top.weight > 0 ? "raising" : "lowering") + " the approval score by " + money(top.weight) + ".";
  std::vector<std::string> rest;
  for (std::size_t k = 1; k < std::min<std::size_t>(3, order.size()); ++k) {
    const auto& w = p.weights[order[k]];
    if (w.weight == 0.0) break;
    rest.push_back("the " + name(order[k]) + " (" + (w.weight > 0 ? "up " : "down ") + money(w.weight) + ")");
  }
  if (!rest.empty()) text += " " + capitalise(join_and(rest)) + " also played a part.";
  return text;
}

std::string describe(const Counterfactual& p, const TabularDataset& data) {
  if (p.changes.empty()) {
    return "No changes are needed: the application is already " + std::string(outcome_name(p.new_label)) + ".";
  }
  std::vector<std::string> parts;
  for (const auto& c : p.changes) {
    auto j = data.find_feature(c.feature);
    const std::string name = j ? data.feature(*j).label() : c.feature;
    parts.push_back("the " + name + " were " + c.new_text + " instead of " + c.old_text);
  }
  return "The decision would change from " + std::string(outcome_name(p.original_label)) + " to " +
         std::string(outcome_name(p.new_label)) + " if " + join_and(parts) + ".";
}

std::string describe(const Neighbours& p) {
  if (p.neighbours.empty()) return "No similar past applications were found.";
  std::size_t approved = 0;
  for (const auto& n : p.neighbours) approved += n.label == kApproved ? 1 : 0;
  const std::size_t rejected = p.neighbours.size() - approved;
  std::string text = "Among the " + plural(p.neighbours.size(), "most similar past application", "most similar past applications") +
                     ", " + std::to_string(approved) + (approved == 1 ? " was" : " were") + " approved and " +
                     std::to_string(rejected) + (rejected == 1 ? " was" : " were") + " rejected.";
  text += " The closest one was " + std::string(outcome_name(p.neighbours.front().label)) + ".";
  return text;
}

std::string describe(const AnchorRule& p, const TabularDataset& data) {
  const std::string outcome(outcome_name(p.prediction));
  if (p.predicates.empty()) {
    return "The application would be " + outcome + " whatever its details.";
  }
  std::vector<std::string> parts;
  for (const auto& pred : p.predicates) parts.push_back(describe_predicate(data, pred));
  const auto percent = static_cast<long>(std::lround(p.precision * 100.0));
  return "The application is " + outcome + " whenever " + join_and(parts) + ". This rule held in " +
         std::to_string(percent) + "% of the " + plural(p.samples, "case", "cases") + " checked.";
}

std::string describe(const DatasetStats& p, const TabularDataset& data, const Instance& x) {
  const std::size_t j = data.feature_index(p.feature);
  const std::string name = data.feature(j).label();
  const std::string yours = x.size() == data.feature_count() ? " Your application has " + data.format_value(j, x[j]) + "." : "";
  if (p.count == 0) return "There is no training data for the " + name + ".";
  if (p.kind == FeatureKind::kNumeric) {
    return capitalise("the " + name) + " in the training data ranges from " + data.format_value(j, *p.min) + " to " +
           data.format_value(j, *p.max) + " with an average of " + data.format_value(j, *p.mean) + ", across " +
           plural(p.count, "application", "applications") + "." + yours;
  }
  std::size_t mode_count = 0;
  for (const auto& b : p.bins) {
    if (b.label == *p.mode) mode_count = b.count;
  }
  std::string mode = *p.mode;
  std::replace(mode.begin(), mode.end(), '_', ' ');
  return "The most common " + name + " in the training data is " + mode + " (" + std::to_string(mode_count) +
         " of " + plural(p.count, "application", "applications") + ")." + yours;
}

}  // namespace

std::string describe_predicate(const TabularDataset& data, const Predicate& p) {
  const std::string name = "the " + data.feature(p.feature_index).label();
  const std::string value = data.format_value(p.feature_index, p.value);
  switch (p.op) {
    case PredicateOp::kLess: return name + " is below " + value;
    case PredicateOp::kGreaterEqual: return name + " is at least " + value;
    case PredicateOp::kEqual: return name + " is " + value;
  }
  return name;
}

ExplanationArtifact annotate(const ExplanationArtifact& artifact, const TabularDataset& data,
                             const Instance& x) {
  std::string text = std::visit(
      [&](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FeatureAttribution>) return describe(p, data);
        else if constexpr (std::is_same_v<T, Counterfactual>) return describe(p, data);
        else if constexpr (std::is_same_v<T, Neighbours>) return describe(p);
        else if constexpr (std::is_same_v<T, AnchorRule>) return describe(p, data);
        else if constexpr (std::is_same_v<T, DatasetStats>) return describe(p, data, x);
        else throw Error(ErrorCode::kUnsupportedPayload, "text annotations cannot be annotated again");
      },
      artifact.payload);
  text += " This explanation comes from " + technique_phrase(artifact.provenance.technique) +
          ", applied to the decision model and its " + plural(data.size(), "training application", "training applications") + ".";

  ExplanationArtifact a;
  a.type_id = "textual_explanation";
  a.payload = TextAnnotation{std::move(text), artifact.id};
  a.provenance.technique = "template_nlg";
  a.provenance.parameters = {{"annotates", artifact.id}, {"source_technique", artifact.provenance.technique}};
  a.provenance.seed = artifact.provenance.seed;
  return a;
}

}  // namespace xp::explain
