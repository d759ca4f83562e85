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
#include <limits>

#include "xp/error.hpp"
#include "xp/explain/techniques.hpp"

namespace xp::explain {

namespace {

struct Candidate {
  std::vector<std::size_t> features;
  std::vector<std::size_t> positions;  // grid index per changed feature
  double cost = std::numeric_limits<double>::infinity();
  Instance point;
};

// Lexicographic search over feature subsets of size m and, within each, over
// the grid values that differ from x. Keeps the first minimum-cost flip.
class SubsetSearch {
 public:
  SubsetSearch(const Model& model, const TabularDataset& data, const Instance& x,
               const CounterfactualGrid& grid, int desired)
      : model_(model), data_(data), x_(x), grid_(grid), desired_(desired) {
    options_.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (std::size_t p = 0; p < grid[j].size(); ++p) {
        if (grid[j][p] != x[j]) options_[j].push_back(p);
      }
    }
  }

  // Model evaluations needed for all subsets of size m.
  double evaluations(std::size_t m) const {
    std::vector<double> ways(m + 1, 0.0);
    ways[0] = 1.0;
    for (const auto& opts : options_) {
      for (std::size_t k = m; k >= 1; --k) ways[k] += ways[k - 1] * static_cast<double>(opts.size());
    }
    return ways[m];
  }

  std::optional<Candidate> run(std::size_t m) {
    best_.reset();
    chosen_.clear();
    positions_.clear();
    point_ = x_;
    choose(0, m, 0.0);
    return best_;
  }

 private:
  void choose(std::size_t from, std::size_t remaining, double cost) {
    if (remaining == 0) {
      if (best_ && !(cost < best_->cost)) return;
      if (model_.predict(point_) == desired_) best_ = Candidate{chosen_, positions_, cost, point_};
      return;
    }
    for (std::size_t j = from; j + remaining <= x_.size(); ++j) {
      if (options_[j].empty()) continue;
      chosen_.push_back(j);
      for (std::size_t p : options_[j]) {
        point_[j] = grid_[j][p];
        positions_.push_back(p);
        choose(j + 1, remaining - 1, cost + feature_cost(j, grid_[j][p]));
        positions_.pop_back();
      }
      point_[j] = x_[j];
      chosen_.pop_back();
    }
  }

  double feature_cost(std::size_t j, double value) const {
    const auto& f = data_.feature(j);
    if (f.kind == FeatureKind::kCategorical) return value == x_[j] ? 0.0 : 1.0;
    return f.range() > 0 ? std::abs(value - x_[j]) / f.range() : 0.0;
  }

  const Model& model_;
  const TabularDataset& data_;
  const Instance& x_;
  const CounterfactualGrid& grid_;
  int desired_;
  std::vector<std::vector<std::size_t>> options_;
  std::vector<std::size_t> chosen_;
  std::vector<std::size_t> positions_;
  Instance point_;
  std::optional<Candidate> best_;
};

double desired_score(const Model& model, const Instance& z, int desired) {
  const double s = model.score(z);
  return desired == kApproved ? s : 1.0 - s;
}

// Adds one change at a time, each maximising the desired-class score.
std::optional<Candidate> greedy(const Model& model, const TabularDataset& data, const Instance& x,
                                const CounterfactualGrid& grid, int desired, std::size_t max_changes) {
  Candidate c;
  c.point = x;
  c.cost = 0.0;
  std::vector<bool> used(x.size(), false);
  for (std::size_t step = 0; step < max_changes; ++step) {
    double best_score = -1.0;
    double best_cost = 0.0;
    std::size_t best_j = 0, best_p = 0;
    bool found = false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (used[j]) continue;
      for (std::size_t p = 0; p < grid[j].size(); ++p) {
        if (grid[j][p] == x[j]) continue;
        Instance z = c.point;
        z[j] = grid[j][p];
        const double s = desired_score(model, z, desired);
        const double cost = change_cost(data, x, z);
        if (!found || s > best_score || (s == best_score && cost < best_cost)) {
          found = true;
          best_score = s;
          best_cost = cost;
          best_j = j;
          best_p = p;
        }
      }
    }
    if (!found) return std::nullopt;
    used[best_j] = true;
    c.point[best_j] = grid[best_j][best_p];
    c.features.push_back(best_j);
    c.positions.push_back(best_p);
    c.cost = best_cost;
    if (model.predict(c.point) == desired) return c;
  }
  return std::nullopt;
}

}  // namespace

CounterfactualGrid make_grid(const TabularDataset& data, std::size_t levels) {
  CounterfactualGrid grid(data.feature_count());
  for (std::size_t j = 0; j < data.feature_count(); ++j) {
    const auto& f = data.feature(j);
    if (f.kind == FeatureKind::kCategorical) {
      for (std::size_t l = 0; l < f.levels.size(); ++l) grid[j].push_back(static_cast<double>(l));
    } else if (levels <= 1 || f.range() == 0) {
      grid[j].push_back(f.min);
    } else {
      for (std::size_t l = 0; l < levels; ++l) {
        grid[j].push_back(f.min + f.range() * static_cast<double>(l) / static_cast<double>(levels - 1));
      }
    }
  }
  return grid;
}

double change_cost(const TabularDataset& data, const Instance& x, const Instance& z) {
  double cost = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& f = data.feature(j);
    if (f.kind == FeatureKind::kCategorical) {
      cost += x[j] == z[j] ? 0.0 : 1.0;
    } else if (f.range() > 0) {
      cost += std::abs(z[j] - x[j]) / f.range();
    }
  }
  return cost;
}

ExplanationArtifact counterfactual(const Model& model, const TabularDataset& data, const Instance& x,
                                   const CounterfactualGrid& grid, const CounterfactualOptions& options) {
  data.check_instance(x);
  if (grid.size() != x.size()) {
    throw Error(ErrorCode::kInvalidInstance, "counterfactual grid width differs from the instance");
  }
  Counterfactual cf;
  cf.original_label = model.predict(x);
  cf.new_label = options.desired;
  cf.point = x;

  ExplanationArtifact a;
  a.type_id = "counterfactual";
  a.provenance.technique = "grid_counterfactual";
  a.provenance.parameters = {{"max_changes", options.max_changes},
                             {"desired", options.desired},
                             {"grid_sizes", [&] {
                                std::vector<std::size_t> sizes;
                                for (const auto& g : grid) sizes.push_back(g.size());
                                return sizes;
                              }()}};

  if (cf.original_label == options.desired) {
    a.payload = std::move(cf);
    return a;
  }

  SubsetSearch search(model, data, x, grid, options.desired);
  std::optional<Candidate> found;
  std::size_t m = 1;
  double spent = 0.0;
  for (; m <= options.max_changes && !found; ++m) {
    const double need = search.evaluations(m);
    if (m > 2 && spent + need > static_cast<double>(options.exhaustive_budget)) break;
    spent += need;
    found = search.run(m);
  }
  std::string strategy = "exhaustive";
  if (!found && m <= options.max_changes) {
    found = greedy(model, data, x, grid, options.desired, options.max_changes);
    strategy = "greedy";
  }
  a.provenance.parameters["strategy"] = strategy;
  if (!found) {
    throw Error(ErrorCode::kNoCounterfactualFound,
                "no change of at most " + std::to_string(options.max_changes) + " features reaches " +
                    std::string(outcome_name(options.desired)));
  }

  std::vector<std::size_t> order(found->features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return found->features[l] < found->features[r]; });
  for (std::size_t i : order) {
    const std::size_t j = found->features[i];
    const double nv = found->point[j];
    cf.changes.push_back({data.feature(j).name, x[j], nv, data.format_value(j, x[j]), data.format_value(j, nv)});
  }
  cf.point = found->point;
  cf.cost = change_cost(data, x, cf.point);
  a.payload = std::move(cf);
  return a;
}

}  // namespace xp::explain
