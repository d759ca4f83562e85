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

#include "xp/error.hpp"
#include "xp/explain/techniques.hpp"
#include "xp/rng.hpp"

namespace xp::explain {

namespace {

struct Estimate {
  double precision = 0.0;
  std::size_t samples = 0;
};

// Smallest half-open interval [lo, hi) allowed for feature j by the rule.
std::pair<double, double> allowed_range(const FeatureSpec& f, const std::vector<Predicate>& rule,
                                        std::size_t j) {
  double lo = f.min, hi = f.max;
  bool hi_open = false;
  for (const auto& p : rule) {
    if (p.feature_index != j) continue;
    if (p.op == PredicateOp::kGreaterEqual) lo = std::max(lo, p.value);
    if (p.op == PredicateOp::kLess && p.value <= hi) {
      hi = p.value;
      hi_open = true;
    }
  }
  if (hi_open && hi > lo) hi = std::nextafter(hi, lo);
  return {lo, hi};
}

class PrecisionEstimator {
 public:
  PrecisionEstimator(const Model& model, const TabularDataset& data, const AnchorOptions& options,
                     int target)
      : model_(model), data_(data), options_(options), target_(target) {}

  Estimate estimate(const std::vector<Predicate>& rule, std::uint64_t stream) const {
    return options_.evaluation_grid ? on_grid(rule) : sampled(rule, stream);
  }

 private:
  Estimate sampled(const std::vector<Predicate>& rule, std::uint64_t stream) const {
    Rng rng(mix_seed(options_.seed, stream));
    std::size_t hits = 0;
    const std::size_t d = data_.feature_count();
    Instance z(d);
    for (std::size_t s = 0; s < options_.n_samples; ++s) {
      if (data_.size() > 0) {
        z = data_.rows()[static_cast<std::size_t>(rng.below(data_.size()))];
      } else {
        for (std::size_t j = 0; j < d; ++j) z[j] = draw(data_.feature(j), {}, j, rng);
      }
      for (std::size_t j = 0; j < d; ++j) {
        bool ok = true;
        for (const auto& p : rule) {
          if (p.feature_index == j && !p.holds(z)) ok = false;
        }
        if (!ok) z[j] = draw(data_.feature(j), rule, j, rng);
      }
      hits += model_.predict(z) == target_ ? 1 : 0;
    }
    return {options_.n_samples ? static_cast<double>(hits) / static_cast<double>(options_.n_samples) : 0.0,
            options_.n_samples};
  }

  static double draw(const FeatureSpec& f, const std::vector<Predicate>& rule, std::size_t j, Rng& rng) {
    if (f.kind == FeatureKind::kCategorical) {
      for (const auto& p : rule) {
        if (p.feature_index == j && p.op == PredicateOp::kEqual) return p.value;
      }
      return static_cast<double>(rng.below(f.levels.size()));
    }
    auto [lo, hi] = allowed_range(f, rule, j);
    return hi > lo ? rng.uniform(lo, hi) : lo;
  }

  Estimate on_grid(const std::vector<Predicate>& rule) const {
    const auto& grid = *options_.evaluation_grid;
    const std::size_t d = grid.size();
    double cells = 1.0;
    for (const auto& g : grid) cells *= static_cast<double>(g.size());
    if (d != data_.feature_count() || cells == 0 || cells > 1e6) {
      throw Error(ErrorCode::kInvalidInstance, "anchor evaluation grid must match the features and hold at most 1e6 cells");
    }
    std::vector<std::size_t> idx(d, 0);
    Instance z(d);
    std::size_t covered = 0, hits = 0;
    while (true) {
      for (std::size_t j = 0; j < d; ++j) z[j] = grid[j][idx[j]];
      bool inside = true;
      for (const auto& p : rule) inside = inside && p.holds(z);
      if (inside) {
        ++covered;
        hits += model_.predict(z) == target_ ? 1 : 0;
      }
      std::size_t j = 0;
      while (j < d && ++idx[j] == grid[j].size()) idx[j++] = 0;
      if (j == d) break;
    }
    return {covered ? static_cast<double>(hits) / static_cast<double>(covered) : 0.0, covered};
  }

  const Model& model_;
  const TabularDataset& data_;
  const AnchorOptions& options_;
  int target_;
};

double coverage(const TabularDataset& data, const std::vector<Predicate>& rule) {
  if (data.size() == 0) return 0.0;
  std::size_t n = 0;
  for (const auto& row : data.rows()) {
    bool inside = true;
    for (const auto& p : rule) inside = inside && p.holds(row);
    n += inside ? 1 : 0;
  }
  return static_cast<double>(n) / static_cast<double>(data.size());
}

std::vector<Predicate> candidates(const TabularDataset& data, const Instance& x, const AnchorOptions& options) {
  std::vector<Predicate> out;
  for (std::size_t j = 0; j < data.feature_count(); ++j) {
    const auto& f = data.feature(j);
    if (f.kind == FeatureKind::kCategorical) {
      out.push_back({f.name, j, PredicateOp::kEqual, x[j]});
      continue;
    }
    std::vector<double> cuts = j < options.cut_points.size() && !options.cut_points[j].empty()
                                   ? options.cut_points[j]
                                   : quartile_cuts(data, j);
    std::sort(cuts.begin(), cuts.end());
    std::optional<double> lower, upper;
    for (double c : cuts) {
      if (c <= x[j]) lower = c;
      if (c > x[j] && !upper) upper = c;
    }
    if (lower && *lower > f.min) out.push_back({f.name, j, PredicateOp::kGreaterEqual, *lower});
    if (upper && *upper <= f.max) out.push_back({f.name, j, PredicateOp::kLess, *upper});
  }
  return out;
}

}  // namespace

std::vector<double> quartile_cuts(const TabularDataset& data, std::size_t feature) {
  std::vector<double> values;
  values.reserve(data.size());
  for (const auto& row : data.rows()) values.push_back(row[feature]);
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  std::vector<double> cuts;
  for (double q : {0.25, 0.5, 0.75}) {
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    cuts.push_back(values[std::max<std::size_t>(rank, 1) - 1]);
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

ExplanationArtifact anchor_rule(const Model& model, const TabularDataset& data, const Instance& x,
                                const AnchorOptions& options) {
  if (!(options.precision_threshold > 0.5 && options.precision_threshold <= 1.0)) {
    throw Error(ErrorCode::kSchemaError, "anchor precision threshold must lie in (0.5, 1]");
  }
  data.check_instance(x);
  const int target = model.predict(x);
  PrecisionEstimator estimator(model, data, options, target);

  AnchorRule rule;
  rule.prediction = target;
  std::vector<Predicate> pool = candidates(data, x, options);
  Estimate current = estimator.estimate(rule.predicates, 0);
  std::uint64_t round = 0;
  while (current.precision < options.precision_threshold) {
    ++round;
    std::optional<std::size_t> best;
    Estimate best_est;
    double best_cov = -1.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      std::vector<Predicate> trial = rule.predicates;
      trial.push_back(pool[c]);
      Estimate e = estimator.estimate(trial, round);
      double cov = coverage(data, trial);
      if (!best || e.precision > best_est.precision ||
          (e.precision == best_est.precision && cov > best_cov)) {
        best = c;
        best_est = e;
        best_cov = cov;
      }
    }
    if (!best) {
      throw Error(ErrorCode::kNoAnchorFound,
                  "no conjunction of predicates reaches precision " + format_number(options.precision_threshold));
    }
    rule.predicates.push_back(pool[*best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*best));
    current = best_est;
  }
  std::sort(rule.predicates.begin(), rule.predicates.end(), [](const Predicate& l, const Predicate& r) {
    return l.feature_index != r.feature_index ? l.feature_index < r.feature_index : l.op < r.op;
  });
  rule.precision = current.precision;
  rule.samples = current.samples;
  rule.coverage = coverage(data, rule.predicates);

  ExplanationArtifact a;
  a.type_id = "anchor";
  a.payload = std::move(rule);
  a.provenance.technique = "greedy_anchor";
  a.provenance.parameters = {{"precision_threshold", options.precision_threshold},
                             {"n_samples", options.n_samples},
                             {"evaluation", options.evaluation_grid ? "grid" : "sampled"}};
  a.provenance.seed = options.seed;
  return a;
}

}  // namespace xp::explain
