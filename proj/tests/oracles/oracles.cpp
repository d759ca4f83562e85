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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "xp/rng.hpp"

namespace xp::oracle {

using explain::Instance;
using protocol::AgentRole;
using protocol::DialogueState;
using protocol::LegalMove;
using protocol::Move;
using protocol::MoveKind;
using protocol::Phase;

namespace {

Instance mix(const Instance& x, const Instance& baseline, const std::vector<bool>& on) {
  Instance z = baseline;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (on[i]) z[i] = x[i];
  }
  return z;
}

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

std::vector<double> shapley_by_permutations(const explain::Model& model, const Instance& x,
                                            const Instance& baseline) {
  const std::size_t d = x.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(d, 0.0);
  std::size_t count = 0;
  do {
    std::vector<bool> on(d, false);
    double before = model.score(mix(x, baseline, on));
    for (std::size_t i : order) {
      on[i] = true;
      const double after = model.score(mix(x, baseline, on));
      phi[i] += after - before;
      before = after;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& p : phi) p /= static_cast<double>(count);
  return phi;
}

std::vector<double> shapley_by_coalitions(const explain::Model& model, const Instance& x,
                                          const Instance& baseline) {
  const std::size_t d = x.size();
  std::vector<double> phi(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
      if (mask & (1ULL << i)) continue;
      std::vector<bool> on(d, false);
      std::size_t s = 0;
      for (std::size_t j = 0; j < d; ++j) {
        if (mask & (1ULL << j)) {
          on[j] = true;
          ++s;
        }
      }
      const double without = model.score(mix(x, baseline, on));
      on[i] = true;
      const double with = model.score(mix(x, baseline, on));
      phi[i] += factorial(s) * factorial(d - s - 1) / factorial(d) * (with - without);
    }
  }
  return phi;
}

std::optional<CounterfactualAnswer> exhaustive_counterfactual(const explain::Model& model,
                                                              const explain::TabularDataset& data,
                                                              const Instance& x,
                                                              const explain::CounterfactualGrid& grid,
                                                              std::size_t max_changes, int desired) {
  if (model.predict(x) == desired) return CounterfactualAnswer{{}, 0.0, x};
  using Key = std::tuple<std::size_t, double, std::vector<std::size_t>, std::vector<std::size_t>>;
  std::optional<Key> best_key;
  std::optional<CounterfactualAnswer> best;

  // Each feature keeps its value (position 0) or takes grid value pos - 1.
  const std::size_t d = x.size();
  std::vector<std::size_t> pos(d, 0);
  while (true) {
    Instance z = x;
    std::vector<std::size_t> changed;
    std::vector<std::size_t> positions;
    double cost = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (pos[j] == 0) continue;
      z[j] = grid[j][pos[j] - 1];
      if (z[j] == x[j]) continue;
      changed.push_back(j);
      positions.push_back(pos[j] - 1);
      const auto& f = data.feature(j);
      if (f.kind == explain::FeatureKind::kCategorical) {
        cost += 1.0;
      } else if (f.range() > 0) {
        cost += std::abs(z[j] - x[j]) / f.range();
      }
    }
    if (changed.size() <= max_changes && model.predict(z) == desired) {
      Key key{changed.size(), cost, changed, positions};
      if (!best_key || key < *best_key) {
        best_key = key;
        best = CounterfactualAnswer{changed, cost, z};
      }
    }
    std::size_t j = 0;
    while (j < d && ++pos[j] == grid[j].size() + 1) pos[j++] = 0;
    if (j == d) break;
  }
  return best;
}

std::vector<RankedRow> sorted_by_gower(const explain::TabularDataset& data, const Instance& x) {
  std::vector<RankedRow> out;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto& row = data.rows()[r];
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto& f = data.feature(j);
      if (f.kind == explain::FeatureKind::kCategorical) {
        sum += row[j] == x[j] ? 0.0 : 1.0;
      } else if (f.range() > 0) {
        sum += std::abs(row[j] - x[j]) / f.range();
      }
    }
    out.push_back({r, sum / static_cast<double>(x.size())});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedRow& a, const RankedRow& b) { return a.distance < b.distance; });
  return out;
}

explain::TabularDataset random_dataset(std::size_t numeric, std::size_t categorical, std::size_t rows,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<explain::FeatureSpec> features;
  for (std::size_t i = 0; i < numeric; ++i) {
    const double lo = std::round(rng.uniform(-10.0, 10.0));
    features.push_back(explain::FeatureSpec::numeric("n" + std::to_string(i), lo, lo + 1.0 + std::round(rng.uniform(0.0, 20.0))));
  }
  for (std::size_t i = 0; i < categorical; ++i) {
    std::vector<std::string> levels;
    const std::size_t n = 2 + rng.below(3);
    for (std::size_t l = 0; l < n; ++l) levels.push_back("l" + std::to_string(l));
    features.push_back(explain::FeatureSpec::categorical("c" + std::to_string(i), levels));
  }
  std::vector<Instance> data;
  std::vector<int> labels;
  for (std::size_t r = 0; r < rows; ++r) {
    Instance x;
    for (const auto& f : features) {
      if (f.kind == explain::FeatureKind::kNumeric) {
        // Coarse values so that exact distance ties occur.
        x.push_back(std::round(rng.uniform(f.min, f.max)));
      } else {
        x.push_back(static_cast<double>(rng.below(f.levels.size())));
      }
    }
    data.push_back(std::move(x));
    labels.push_back(static_cast<int>(r % 2));
  }
  return explain::TabularDataset(std::move(features), std::move(data), std::move(labels), "random");
}

std::shared_ptr<explain::Model> random_model(const explain::TabularDataset& data, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t d = data.feature_count();
  std::vector<double> w(d);
  std::vector<double> centre(d);
  std::vector<double> scale(d);
  for (std::size_t j = 0; j < d; ++j) {
    w[j] = rng.uniform(-3.0, 3.0);
    const auto& f = data.feature(j);
    if (f.kind == explain::FeatureKind::kNumeric) {
      centre[j] = (f.min + f.max) / 2;
      scale[j] = f.range() > 0 ? f.range() / 2 : 1.0;
    } else {
      centre[j] = static_cast<double>(f.levels.size() - 1) / 2;
      scale[j] = 1.0;
    }
  }
  const double pair = rng.uniform(-2.0, 2.0);
  const double bias = rng.uniform(-1.0, 1.0);
  return std::make_shared<explain::FunctionModel>(
      [=](const Instance& x) {
        double z = bias;
        for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * (x[j] - centre[j]) / scale[j];
        if (x.size() >= 2) z += pair * (x[0] - centre[0]) / scale[0] * (x[1] - centre[1]) / scale[1];
        return 1.0 / (1.0 + std::exp(-z));
      },
      "random");
}

// ---- protocol ------------------------------------------------------------------

namespace {

bool edge_open(const iff::UserQuestion& q, const iff::FollowupEdge& e, const iff::TypeIdSet& seen) {
  return !seen.contains(e.type_id) || e.type_id == q.recommended.front();
}

bool kind_open(const iff::UserQuestion& q, iff::FollowupKind kind, const iff::TypeIdSet& seen) {
  return std::any_of(q.followups.begin(), q.followups.end(),
                     [&](const auto& e) { return e.kind == kind && edge_open(q, e, seen); });
}

// Control part of a state: everything a rule may read.
std::string control_key(const DialogueState& s) {
  auto j = protocol::state_to_json(s);
  j.erase("history");
  j.erase("commitments");
  return j.dump();
}

}  // namespace

std::vector<LegalMove> expected_moves(const DialogueState& s) {
  constexpr auto Q = AgentRole::kQuestioner;
  constexpr auto E = AgentRole::kExplainer;
  std::vector<LegalMove> out;
  const iff::UserQuestion* q = s.active();
  switch (s.phase) {
    case Phase::kIdle:
      for (const auto& question : s.view->questions) out.emplace_back(Q, Move::begin_question(question.id));
      break;
    case Phase::kInQuestion:
      out.emplace_back(E, Move::begin_explanation());
      break;
    case Phase::kInExplanation:
      if (!s.recommended_delivered) {
        out.emplace_back(E, Move::explain(q->recommended.front()));
        break;
      }
      if (s.followups_enabled) {
        for (auto kind : iff::kAllFollowupKinds) {
          if (kind_open(*q, kind, s.delivered_types)) out.emplace_back(Q, Move::followup_on(kind));
        }
      }
      for (const auto& question : s.view->questions) {
        if (question.id != q->id) out.emplace_back(Q, Move::return_question(question.id));
      }
      out.emplace_back(Q, Move::begin_argument());
      out.emplace_back(Q, Move::end_explanation());
      break;
    case Phase::kInFollowup:
      if (!s.followup->explained) {
        out.emplace_back(E, Move::explain(s.followup->type_id));
      } else {
        out.emplace_back(Q, Move::affirm(s.followup->kind));
      }
      break;
    case Phase::kInArgument:
      out.emplace_back(Q, s.argument_challenged ? Move::end_argument() : Move::challenge(""));
      break;
    case Phase::kEnded:
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

Phase expected_next_phase(const DialogueState& s, const Move& move) {
  switch (move.kind) {
    case MoveKind::kBeginQuestion: return Phase::kInQuestion;
    case MoveKind::kBeginExplanation: return Phase::kInExplanation;
    case MoveKind::kExplain: return s.phase;
    case MoveKind::kFollowup: return Phase::kInFollowup;
    case MoveKind::kAffirmComplement:
    case MoveKind::kAffirmReplacement:
    case MoveKind::kAffirmValidation: return Phase::kInExplanation;
    case MoveKind::kReturnQuestion: return Phase::kInExplanation;
    case MoveKind::kBeginArgument: return Phase::kInArgument;
    case MoveKind::kChallenge: return Phase::kInArgument;
    case MoveKind::kEndArgument: return Phase::kInExplanation;
    case MoveKind::kEndExplanation: return Phase::kIdle;
  }
  return s.phase;
}

std::vector<LegalMove> probe_moves(const iff::IffGraph& graph) {
  std::vector<std::string> questions{"no_such_question"};
  for (const auto& q : graph.questions) questions.push_back(q.id);
  std::vector<std::string> types{"no_such_type"};
  for (const auto& t : graph.type_forest) types.push_back(t.id);

  std::vector<Move> moves;
  for (const auto& q : questions) {
    moves.push_back(Move::begin_question(q));
    moves.push_back(Move::return_question(q));
  }
  for (const auto& t : types) moves.push_back(Move::explain(t));
  for (auto k : iff::kAllFollowupKinds) {
    moves.push_back(Move::followup_on(k));
    moves.push_back(Move::affirm(k));
  }
  moves.push_back(Move::challenge(""));
  moves.push_back(Move::challenge("I do not think income matters that much"));
  moves.push_back(Move::begin_explanation());
  moves.push_back(Move::begin_argument());
  moves.push_back(Move::end_explanation());
  moves.push_back(Move::end_argument());

  std::vector<LegalMove> out;
  for (auto agent : protocol::kAllAgents) {
    for (const auto& m : moves) out.emplace_back(agent, m);
  }
  return out;
}

ExplorationReport explore(const iff::IffGraph& graph, const std::string& user_group, bool followups_enabled,
                          std::size_t depth) {
  ExplorationReport report;
  const auto probes = probe_moves(graph);
  auto note = [&](std::string what) {
    ++report.disagreements;
    if (report.examples.size() < 5) report.examples.push_back(std::move(what));
  };

  std::deque<std::pair<DialogueState, std::size_t>> frontier;
  std::unordered_set<std::string> seen;
  auto start = protocol::new_session(graph, user_group, followups_enabled, "bfs");
  seen.insert(control_key(start));
  frontier.emplace_back(std::move(start), 0);

  while (!frontier.empty()) {
    auto [state, level] = std::move(frontier.front());
    frontier.pop_front();
    ++report.states;
    report.max_depth = std::max(report.max_depth, level);
    if (state.phase == Phase::kInFollowup) ++report.followup_states;

    const auto expected = expected_moves(state);
    auto advertised = protocol::legal_moves(state);
    if (advertised != expected) {
      note("legal_moves differs from the rules in phase " + std::string(protocol::to_string(state.phase)));
    }
    auto is_expected = [&](const LegalMove& lm) {
      LegalMove probe = lm;
      if (probe.second.kind == MoveKind::kChallenge) probe.second.text.clear();
      return std::binary_search(expected.begin(), expected.end(), probe);
    };

    for (const auto& lm : probes) {
      ++report.probes;
      const bool want = is_expected(lm);
      if (protocol::is_legal(state, lm.first, lm.second) != want) {
        note("is_legal disagrees on " + protocol::to_string(lm));
      }
      try {
        auto next = protocol::apply_move(state, lm.first, lm.second);
        if (!want) {
          note("apply_move accepted " + protocol::to_string(lm));
          continue;
        }
        ++report.transitions;
        if (next.phase != expected_next_phase(state, lm.second)) {
          note("unexpected phase after " + protocol::to_string(lm));
        }
        if (next.history.size() != state.history.size() + 1) note("history not extended by " + protocol::to_string(lm));
        if (level + 1 <= depth && seen.insert(control_key(next)).second) {
          frontier.emplace_back(std::move(next), level + 1);
        }
      } catch (const protocol::ProtocolError& e) {
        if (want) note("apply_move rejected " + protocol::to_string(lm));
        if (e.expected() != advertised) note("error lists other moves than legal_moves");
      }
    }

    // end_dialogue is legal exactly between questions.
    try {
      auto ended = protocol::end_dialogue(state);
      if (state.phase != Phase::kIdle) note("end_dialogue accepted outside idle");
      if (!protocol::legal_moves(ended).empty()) note("moves remain after end_dialogue");
      if (level + 1 <= depth && seen.insert(control_key(ended)).second) {
        frontier.emplace_back(std::move(ended), level + 1);
      }
    } catch (const protocol::ProtocolError&) {
      if (state.phase == Phase::kIdle) note("end_dialogue rejected in idle");
    }
  }
  return report;
}

}  // namespace xp::oracle
