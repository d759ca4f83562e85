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

// Reference implementations used to check the library. They are written
// for obviousness rather than speed and share no code with the code under
// test beyond the data types.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xp/explain/dataset.hpp"
#include "xp/explain/model.hpp"
#include "xp/explain/techniques.hpp"
#include "xp/iff/iff.hpp"
#include "xp/protocol/eedm.hpp"

namespace xp::oracle {

// ---- explainers -------------------------------------------------------------

// Shapley values as the average marginal contribution over all d! feature
// orderings of the game v(S) = score(x on S, baseline elsewhere).
std::vector<double> shapley_by_permutations(const explain::Model& model, const explain::Instance& x,
                                            const explain::Instance& baseline);

// Shapley values by the coalition formula sum_S |S|!(d-|S|-1)!/d! (v(S+i) - v(S)).
std::vector<double> shapley_by_coalitions(const explain::Model& model, const explain::Instance& x,
                                          const explain::Instance& baseline);

struct CounterfactualAnswer {
  std::vector<std::size_t> features;  // changed, ascending
  double cost = 0.0;
  explain::Instance point;
};

// Scans every point whose features each keep their value or take a value of
// the grid. Among points predicted `desired` with at most max_changes
// differing features, returns the minimum by (changes, cost, feature indices,
// grid positions). nullopt when none qualifies.
std::optional<CounterfactualAnswer> exhaustive_counterfactual(const explain::Model& model,
                                                              const explain::TabularDataset& data,
                                                              const explain::Instance& x,
                                                              const explain::CounterfactualGrid& grid,
                                                              std::size_t max_changes, int desired);

struct RankedRow {
  std::size_t row;
  double distance;
};

// Every row with its Gower distance to x, stable-sorted by distance.
std::vector<RankedRow> sorted_by_gower(const explain::TabularDataset& data, const explain::Instance& x);

// Small mixed dataset with `numeric` numeric and `categorical` categorical
// features and uniformly drawn rows. Labels alternate so both classes exist.
explain::TabularDataset random_dataset(std::size_t numeric, std::size_t categorical, std::size_t rows,
                                       std::uint64_t seed);

// Smooth model with pairwise interactions, random coefficients.
std::shared_ptr<explain::Model> random_model(const explain::TabularDataset& data, std::uint64_t seed);

// ---- protocol ----------------------------------------------------------------

// Moves a questioner or explainer may make, written directly from the
// dialogue rules (one case per phase) without the transition table.
std::vector<protocol::LegalMove> expected_moves(const protocol::DialogueState& state);

// Phase the oracle expects after a legal move.
protocol::Phase expected_next_phase(const protocol::DialogueState& state, const protocol::Move& move);

// Every move worth probing in `state`: each kind with every question id and
// type id of the full graph, unknown ids, each followup kind and two
// challenge texts, for both agents.
std::vector<protocol::LegalMove> probe_moves(const iff::IffGraph& graph);

struct ExplorationReport {
  std::size_t states = 0;        // distinct control states visited
  std::size_t transitions = 0;   // accepted (state, move) pairs
  std::size_t probes = 0;        // (state, move) pairs tried
  std::size_t disagreements = 0;  // oracle, legal_moves and apply_move not all equal
  std::size_t followup_states = 0;  // states in phase InFollowup
  std::size_t max_depth = 0;
  std::vector<std::string> examples;  // first few disagreements
};

// Breadth-first search from a fresh session to `depth` moves. States are
// merged when they agree on everything except history and commitments,
// which no rule reads. end_dialogue is probed as an extra move.
ExplorationReport explore(const iff::IffGraph& graph, const std::string& user_group, bool followups_enabled,
                          std::size_t depth);

}  // namespace xp::oracle
