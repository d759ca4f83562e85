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

// Explanation artifacts: the typed result of running one technique. JSON
// form is a tagged union keyed by "payload.kind".

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "xp/explain/dataset.hpp"

namespace xp::explain {

struct AttributionWeight {
  std::string feature;
  double weight = 0.0;

  bool operator==(const AttributionWeight&) const = default;
};

// Weights sum to instance_score - baseline_score.
struct FeatureAttribution {
  std::vector<AttributionWeight> weights;  // feature order
  double baseline_score = 0.0;
  double instance_score = 0.0;

  bool operator==(const FeatureAttribution&) const = default;
};

struct FeatureChange {
  std::string feature;
  double old_value = 0.0;
  double new_value = 0.0;
  std::string old_text;
  std::string new_text;

  bool operator==(const FeatureChange&) const = default;
};

struct Counterfactual {
  std::vector<FeatureChange> changes;  // ascending feature index; empty when no change is needed
  int original_label = kRejected;
  int new_label = kApproved;
  Instance point;  // the instance with all changes applied
  double cost = 0.0;  // normalised L1 distance of the change set

  bool operator==(const Counterfactual&) const = default;
};

struct Neighbour {
  std::size_t row = 0;
  int label = kRejected;
  double distance = 0.0;

  bool operator==(const Neighbour&) const = default;
};

struct Neighbours {
  Instance query;
  std::vector<Neighbour> neighbours;  // ascending distance, then row

  bool operator==(const Neighbours&) const = default;
};

enum class PredicateOp { kLess, kGreaterEqual, kEqual };
std::string_view to_string(PredicateOp op);

struct Predicate {
  std::string feature;
  std::size_t feature_index = 0;
  PredicateOp op = PredicateOp::kEqual;
  double value = 0.0;  // level index for kEqual on a categorical feature

  bool holds(const Instance& x) const;
  bool operator==(const Predicate&) const = default;
};

struct AnchorRule {
  std::vector<Predicate> predicates;  // conjunction; empty means "always"
  int prediction = kRejected;
  double precision = 0.0;
  double coverage = 0.0;
  std::size_t samples = 0;  // evaluations behind `precision`

  bool holds(const Instance& x) const;
  bool operator==(const AnchorRule&) const = default;
};

struct HistogramBin {
  std::string label;
  double lo = 0.0;  // numeric bins only
  double hi = 0.0;
  std::size_t count = 0;

  bool operator==(const HistogramBin&) const = default;
};

struct DatasetStats {
  std::string feature;
  FeatureKind kind = FeatureKind::kNumeric;
  std::vector<HistogramBin> bins;
  std::size_t count = 0;
  std::optional<double> mean;  // numeric
  std::optional<double> min;
  std::optional<double> max;
  std::optional<std::string> mode;  // categorical

  bool operator==(const DatasetStats&) const = default;
};

struct TextAnnotation {
  std::string text;
  std::string annotates;  // id of the annotated artifact

  bool operator==(const TextAnnotation&) const = default;
};

using Payload = std::variant<FeatureAttribution, Counterfactual, Neighbours, AnchorRule,
                             DatasetStats, TextAnnotation>;

enum class PayloadKind {
  kFeatureAttribution,
  kCounterfactual,
  kNeighbours,
  kAnchorRule,
  kDatasetStats,
  kTextAnnotation,
};
std::string_view to_string(PayloadKind kind);
PayloadKind payload_kind(const Payload& payload);

struct Provenance {
  std::string technique;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;

  bool operator==(const Provenance&) const = default;
};

// Agreement between a validating artifact and the artifact it checks.
struct Agreement {
  std::string metric;  // "kendall_concordance", "neighbour_consistency", "anchor_precision"
  double score = 0.0;
  std::string validates;  // id of the checked artifact

  bool operator==(const Agreement&) const = default;
};

struct ExplanationArtifact {
  std::string id;
  std::string type_id;
  Payload payload;
  Provenance provenance;
  std::optional<Agreement> agreement;

  bool operator==(const ExplanationArtifact&) const = default;
};

nlohmann::json to_json(const ExplanationArtifact& artifact);
// Throws kSchemaError.
ExplanationArtifact artifact_from_json(const nlohmann::json& j);

}  // namespace xp::explain
