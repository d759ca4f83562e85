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

#include <cmath>
#include <unordered_map>

#include <Eigen/Dense>

#include "xp/error.hpp"
#include "xp/explain/techniques.hpp"
#include "xp/rng.hpp"

namespace xp::explain {

namespace {

constexpr std::size_t kMaxExactFeatures = 20;
constexpr std::size_t kMaxSampledFeatures = 62;

class CoalitionGame {
 public:
  CoalitionGame(const Model& model, const Instance& x, const Instance& baseline)
      : model_(model), x_(x), baseline_(baseline), z_(baseline) {}

  double value(std::uint64_t mask) {
    auto it = cache_.find(mask);
    if (it != cache_.end()) return it->second;
    for (std::size_t j = 0; j < x_.size(); ++j) z_[j] = (mask >> j) & 1U ? x_[j] : baseline_[j];
    const double v = model_.score(z_);
    cache_.emplace(mask, v);
    return v;
  }

 private:
  const Model& model_;
  const Instance& x_;
  const Instance& baseline_;
  Instance z_;
  std::unordered_map<std::uint64_t, double> cache_;
};

FeatureAttribution make_result(const TabularDataset& data, const std::vector<double>& phi, double base,
                               double full) {
  FeatureAttribution out;
  out.baseline_score = base;
  out.instance_score = full;
  for (std::size_t j = 0; j < phi.size(); ++j) out.weights.push_back({data.feature(j).name, phi[j]});
  return out;
}

void check_inputs(const TabularDataset& data, const Instance& x, const Instance& baseline) {
  data.check_instance(x);
  data.check_instance(baseline);
}

}  // namespace

FeatureAttribution exact_shapley(const Model& model, const TabularDataset& data, const Instance& x,
                                 const Instance& baseline) {
  check_inputs(data, x, baseline);
  const std::size_t d = x.size();
  if (d > kMaxExactFeatures) {
    throw Error(ErrorCode::kInvalidInstance, "exact Shapley values support at most 20 features");
  }
  const std::uint64_t masks = std::uint64_t{1} << d;
  std::vector<double> v(masks);
  Instance z(d);
  for (std::uint64_t m = 0; m < masks; ++m) {
    for (std::size_t j = 0; j < d; ++j) z[j] = (m >> j) & 1U ? x[j] : baseline[j];
    v[m] = model.score(z);
  }
  // weight[s] = s! (d-s-1)! / d!
  std::vector<double> weight(d, 0.0);
  for (std::size_t s = 0; s < d; ++s) {
    weight[s] = std::exp(std::lgamma(static_cast<double>(s) + 1) +
                         std::lgamma(static_cast<double>(d - s)) - std::lgamma(static_cast<double>(d) + 1));
  }
  std::vector<double> phi(d, 0.0);
  for (std::uint64_t m = 0; m < masks; ++m) {
    const auto s = static_cast<std::size_t>(__builtin_popcountll(m));
    for (std::size_t j = 0; j < d; ++j) {
      if ((m >> j) & 1U) continue;
      phi[j] += weight[s] * (v[m | (std::uint64_t{1} << j)] - v[m]);
    }
  }
  return make_result(data, phi, v[0], v[masks - 1]);
}

FeatureAttribution kernel_shap(const Model& model, const TabularDataset& data, const Instance& x,
                               const Instance& baseline, std::size_t n_samples, std::uint64_t seed) {
  check_inputs(data, x, baseline);
  const std::size_t d = x.size();
  if (d <= kMaxExactFeatures && n_samples >= (std::size_t{1} << d)) {
    return exact_shapley(model, data, x, baseline);
  }
  if (d > kMaxSampledFeatures) {
    throw Error(ErrorCode::kInvalidInstance, "kernel SHAP supports at most 62 features");
  }
  CoalitionGame game(model, x, baseline);
  const std::uint64_t full_mask = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  const double base = game.value(0);
  const double full = game.value(full_mask);
  const double delta = full - base;
  if (d == 1) return make_result(data, {delta}, base, full);

  // Coalition sizes 1..d-1 drawn with probability proportional to the
  // Shapley kernel mass of that size; each draw is paired with its
  // complement.
  std::vector<double> size_cdf(d, 0.0);
  double total = 0.0;
  for (std::size_t k = 1; k < d; ++k) {
    total += static_cast<double>(d - 1) / static_cast<double>(k * (d - k));
    size_cdf[k] = total;
  }
  Rng rng(seed);
  std::vector<std::uint64_t> coalitions;
  const std::size_t pairs = std::max<std::size_t>(1, n_samples / 2);
  std::vector<std::size_t> perm(d);
  for (std::size_t s = 0; s < pairs; ++s) {
    const double u = rng.uniform() * total;
    std::size_t k = 1;
    while (k + 1 < d && size_cdf[k] < u) ++k;
    for (std::size_t j = 0; j < d; ++j) perm[j] = j;
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = j + static_cast<std::size_t>(rng.below(d - j));
      std::swap(perm[j], perm[pick]);
      mask |= std::uint64_t{1} << perm[j];
    }
    coalitions.push_back(mask);
    coalitions.push_back(full_mask & ~mask);
  }

  // phi_last = delta - sum(phi_rest); solve for the rest.
  const auto rows = static_cast<Eigen::Index>(coalitions.size());
  const auto cols = static_cast<Eigen::Index>(d - 1);
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::uint64_t mask = coalitions[static_cast<std::size_t>(i)];
    const double z_last = (mask >> (d - 1)) & 1U ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double z_j = (mask >> j) & 1U ? 1.0 : 0.0;
      A(i, j) = z_j - z_last;
    }
    b[i] = game.value(mask) - base - z_last * delta;
  }
  Eigen::MatrixXd normal = A.transpose() * A;
  normal.diagonal().array() += 1e-10;
  Eigen::VectorXd sol = normal.ldlt().solve(A.transpose() * b);
  std::vector<double> phi(d, 0.0);
  double rest = 0.0;
  for (std::size_t j = 0; j + 1 < d; ++j) {
    phi[j] = sol[static_cast<Eigen::Index>(j)];
    rest += phi[j];
  }
  phi[d - 1] = delta - rest;
  return make_result(data, phi, base, full);
}

ExplanationArtifact feature_attribution(const Model& model, const TabularDataset& data,
                                        const Instance& x, const Instance& baseline,
                                        std::size_t n_samples, std::uint64_t seed) {
  const std::size_t d = x.size();
  const bool exact = d <= kMaxExactFeatures && n_samples >= (std::size_t{1} << d);
  ExplanationArtifact a;
  a.type_id = "feature_attribution";
  a.payload = exact ? exact_shapley(model, data, x, baseline)
                    : kernel_shap(model, data, x, baseline, n_samples, seed);
  a.provenance.technique = exact ? "exact_shapley" : "kernel_shap";
  a.provenance.parameters = {{"n_samples", n_samples}, {"baseline", baseline}, {"exact", exact}};
  a.provenance.seed = seed;
  return a;
}

double kendall_concordance(const FeatureAttribution& a, const FeatureAttribution& b) {
  const std::size_t n = std::min(a.weights.size(), b.weights.size());
  if (n < 2) return 1.0;
  auto sign = [](double v) { return (v > 0) - (v < 0); };
  long score = 0;
  long pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int sa = sign(a.weights[i].weight - a.weights[j].weight);
      const int sb = sign(b.weights[i].weight - b.weights[j].weight);
      score += sa == sb ? 1 : -1;
      ++pairs;
    }
  }
  return static_cast<double>(score) / static_cast<double>(pairs);
}

}  // namespace xp::explain
