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

// Explanation techniques over a tabular model. Each returns an artifact with
// an empty id, a default type id and a filled provenance block; callers that
// serve a configured explanation type overwrite id and type_id.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "xp/explain/artifact.hpp"
#include "xp/explain/dataset.hpp"
#include "xp/explain/model.hpp"

namespace xp::explain {

// ---- feature attribution ---------------------------------------------------
//
// The cooperative game sets v(S) = score(z_S), where z_S takes the instance's
// value on S and the baseline's value elsewhere. Weights therefore always
// satisfy sum(weights) = score(x) - score(baseline).

// Shapley values by enumerating all 2^d coalitions. Throws kInvalidInstance
// above 20 features.
FeatureAttribution exact_shapley(const Model& model, const TabularDataset& data, const Instance& x,
                                 const Instance& baseline);

// Kernel SHAP estimate from `n_samples` coalitions drawn from the Shapley
// kernel, solved as a weighted least-squares problem with the efficiency
// constraint eliminated. Falls back to full enumeration when
// n_samples >= 2^d.
FeatureAttribution kernel_shap(const Model& model, const TabularDataset& data, const Instance& x,
                               const Instance& baseline, std::size_t n_samples, std::uint64_t seed);

// Exact when n_samples >= 2^d, sampled otherwise. Throws kInvalidInstance.
ExplanationArtifact feature_attribution(const Model& model, const TabularDataset& data,
                                        const Instance& x, const Instance& baseline,
                                        std::size_t n_samples, std::uint64_t seed);

// ---- counterfactuals -------------------------------------------------------

// Candidate values per feature. Numeric features get `levels` evenly spaced
// values over [min, max]; categorical features get every level.
using CounterfactualGrid = std::vector<std::vector<double>>;
CounterfactualGrid make_grid(const TabularDataset& data, std::size_t levels);

// Normalised L1 size of moving x to z: |dz|/range for numeric features
// (0 when the range is empty), 1 per changed categorical feature.
double change_cost(const TabularDataset& data, const Instance& x, const Instance& z);

struct CounterfactualOptions {
  std::size_t max_changes = 2;
  int desired = kApproved;
  // Change sets are enumerated exhaustively while the number of model
  // evaluations stays within this budget (always at least up to two
  // changes); larger sets are grown greedily.
  std::size_t exhaustive_budget = 200000;
};

// Smallest change set that makes predict() return `desired`, ordered by
// number of changed features, then cost, then feature indices, then grid
// positions. An instance already predicted as `desired` yields no changes.
//
// Throws kInvalidInstance or kNoCounterfactualFound.
ExplanationArtifact counterfactual(const Model& model, const TabularDataset& data, const Instance& x,
                                   const CounterfactualGrid& grid, const CounterfactualOptions& options = {});

// ---- nearest neighbours ----------------------------------------------------

// Mean over features of |a-b|/range (numeric) or mismatch (categorical).
double gower_distance(const TabularDataset& data, const Instance& a, const Instance& b);

// The k rows closest to x, ascending by distance then row index.
// Throws kKTooLarge or kInvalidInstance.
ExplanationArtifact nearest_neighbours(const TabularDataset& data, const Instance& x, std::size_t k);

// ---- anchors ---------------------------------------------------------------

struct AnchorOptions {
  double precision_threshold = 0.95;  // in (0.5, 1]
  std::size_t n_samples = 500;
  std::uint64_t seed = 0;
  // Cut points per feature for numeric predicates. Features without an entry
  // use the quartiles of the data.
  std::vector<std::vector<double>> cut_points;
  // When set, precision is computed exactly over the product of these
  // values instead of by sampling.
  std::optional<std::vector<std::vector<double>>> evaluation_grid;
};

// Greedy conjunction of single-feature predicates around x whose precision
// (share of perturbed points that keep x's prediction) reaches the
// threshold. Perturbations draw a data row and resample constrained
// features inside their predicate.
//
// Throws kSchemaError (threshold out of range), kInvalidInstance or
// kNoAnchorFound.
ExplanationArtifact anchor_rule(const Model& model, const TabularDataset& data, const Instance& x,
                                const AnchorOptions& options);

// Sorted, de-duplicated quartiles of a numeric column.
std::vector<double> quartile_cuts(const TabularDataset& data, std::size_t feature);

// ---- dataset statistics ----------------------------------------------------

// Ten equal-width bins over the observed range for numeric features (one bin
// when all values are equal), one bin per level for categorical features.
// Throws kUnknownFeature.
ExplanationArtifact dataset_stats(const TabularDataset& data, std::string_view feature);

// ---- annotation ------------------------------------------------------------

// Plain-language summary of an artifact followed by a sentence naming its
// source. Throws kUnsupportedPayload for text annotations.
ExplanationArtifact annotate(const ExplanationArtifact& artifact, const TabularDataset& data,
                             const Instance& x);

// Readable form of one predicate, e.g. "interest rate is below 12.5".
std::string describe_predicate(const TabularDataset& data, const Predicate& predicate);

// ---- agreement -------------------------------------------------------------

// Kendall-style rank agreement of two attribution vectors over the same
// features, in [-1, 1]. A pair counts as concordant when both orderings
// agree, including both tied; 1.0 with fewer than two features.
double kendall_concordance(const FeatureAttribution& a, const FeatureAttribution& b);

}  // namespace xp::explain
