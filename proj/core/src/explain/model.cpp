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

#include "xp/explain/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "xp/error.hpp"

namespace xp::explain {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_both_labels(const TabularDataset& data) {
  if (data.count_label(kApproved) == 0 || data.count_label(kRejected) == 0) {
    throw Error(ErrorCode::kDegenerateData, "training data must contain both outcomes");
  }
}

// Standardised numeric columns followed by one-hot level columns, plus a
// leading intercept column.
class Encoder {
 public:
  explicit Encoder(const TabularDataset& data) : features_(data.features()) {
    const auto n = static_cast<double>(data.size());
    mean_.assign(features_.size(), 0.0);
    scale_.assign(features_.size(), 1.0);
    width_ = 1;
    for (std::size_t j = 0; j < features_.size(); ++j) {
      if (features_[j].kind == FeatureKind::kNumeric) {
        double sum = 0.0, sq = 0.0;
        for (const auto& row : data.rows()) sum += row[j];
        mean_[j] = sum / n;
        for (const auto& row : data.rows()) sq += (row[j] - mean_[j]) * (row[j] - mean_[j]);
        double sd = std::sqrt(sq / n);
        scale_[j] = sd > 0 ? sd : 1.0;
        width_ += 1;
      } else {
        width_ += features_[j].levels.size();
      }
    }
  }

  std::size_t width() const { return width_; }

  Eigen::VectorXd encode(const Instance& x) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width_));
    Eigen::Index col = 0;
    v[col++] = 1.0;
    for (std::size_t j = 0; j < features_.size(); ++j) {
      if (features_[j].kind == FeatureKind::kNumeric) {
        v[col++] = (x[j] - mean_[j]) / scale_[j];
      } else {
        v[col + static_cast<Eigen::Index>(x[j])] = 1.0;
        col += static_cast<Eigen::Index>(features_[j].levels.size());
      }
    }
    return v;
  }

  json to_json() const { return {{"mean", mean_}, {"scale", scale_}}; }

 private:
  std::vector<FeatureSpec> features_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::size_t width_ = 0;
};

class LogisticModel : public Model {
 public:
  LogisticModel(Encoder encoder, Eigen::VectorXd beta, std::uint64_t seed)
      : encoder_(std::move(encoder)), beta_(std::move(beta)), seed_(seed) {}

  double score(const Instance& x) const override { return sigmoid(beta_.dot(encoder_.encode(x))); }
  ModelKind kind() const override { return ModelKind::kLogisticSurrogate; }
  json parameters() const override {
    return {{"kind", "logistic_surrogate"},
            {"seed", seed_},
            {"encoder", encoder_.to_json()},
            {"coefficients", std::vector<double>(beta_.data(), beta_.data() + beta_.size())}};
  }

 private:
  Encoder encoder_;
  Eigen::VectorXd beta_;
  std::uint64_t seed_;
};

std::shared_ptr<const Model> fit_logistic(const TabularDataset& data, std::uint64_t seed) {
  constexpr double kRidge = 1e-2;
  Encoder enc(data);
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto p = static_cast<Eigen::Index>(enc.width());
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.row(i) = enc.encode(data.rows()[static_cast<std::size_t>(i)]).transpose();
    y[i] = data.labels()[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd ridge = Eigen::VectorXd::Constant(p, kRidge);
  ridge[0] = 0.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd prob = (X * beta).unaryExpr([](double z) { return sigmoid(z); });
    Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
    Eigen::VectorXd grad = X.transpose() * (y - prob) - ridge.cwiseProduct(beta);
    Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
    H.diagonal() += ridge;
    H.diagonal().array() += 1e-9;
    Eigen::VectorXd step = H.ldlt().solve(grad);
    beta += step;
    if (step.norm() < 1e-10) break;
  }
  return std::make_shared<LogisticModel>(std::move(enc), std::move(beta), seed);
}

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  bool categorical = false;
  double threshold = 0.0;  // numeric: go left when x < threshold; categorical: left when x == threshold
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t count = 0;
};

class TreeModel : public Model {
 public:
  TreeModel(std::vector<TreeNode> nodes, std::uint64_t seed) : nodes_(std::move(nodes)), seed_(seed) {}

  double score(const Instance& x) const override {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
      const auto& node = nodes_[static_cast<std::size_t>(at)];
      const double v = x[static_cast<std::size_t>(node.feature)];
      bool go_left = node.categorical ? v == node.threshold : v < node.threshold;
      at = go_left ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(at)].value;
  }
  ModelKind kind() const override { return ModelKind::kTreeSurrogate; }
  json parameters() const override {
    json nodes = json::array();
    for (const auto& n : nodes_) {
      nodes.push_back({{"feature", n.feature}, {"categorical", n.categorical}, {"threshold", n.threshold},
                       {"left", n.left}, {"right", n.right}, {"value", n.value}, {"count", n.count}});
    }
    return {{"kind", "tree_surrogate"}, {"seed", seed_}, {"nodes", std::move(nodes)}};
  }

 private:
  std::vector<TreeNode> nodes_;
  std::uint64_t seed_;
};

class TreeBuilder {
 public:
  static constexpr int kMaxDepth = 5;
  static constexpr std::size_t kMinLeaf = 5;

  explicit TreeBuilder(const TabularDataset& data) : data_(data) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> idx(data_.size());
    std::iota(idx.begin(), idx.end(), 0);
    grow(idx, 0);
    return std::move(nodes_);
  }

 private:
  static double gini(double pos, double total) {
    if (total <= 0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
  }

  int grow(const std::vector<std::size_t>& idx, int depth) {
    const int at = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double pos = 0;
    for (auto i : idx) pos += data_.labels()[i];
    const double total = static_cast<double>(idx.size());
    nodes_[static_cast<std::size_t>(at)].value = pos / total;
    nodes_[static_cast<std::size_t>(at)].count = idx.size();
    if (depth >= kMaxDepth || idx.size() < 2 * kMinLeaf || pos == 0 || pos == total) return at;

    const double parent = gini(pos, total) * total;
    double best_gain = 1e-12;
    int best_feature = -1;
    bool best_categorical = false;
    double best_threshold = 0.0;
    for (std::size_t j = 0; j < data_.feature_count(); ++j) {
      const auto& f = data_.feature(j);
      if (f.kind == FeatureKind::kNumeric) {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(idx.size());
        for (auto i : idx) vals.emplace_back(data_.rows()[i][j], data_.labels()[i]);
        std::sort(vals.begin(), vals.end());
        double left_pos = 0;
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
          left_pos += vals[k].second;
          if (vals[k].first == vals[k + 1].first) continue;
          const double nl = static_cast<double>(k + 1), nr = total - nl;
          if (nl < kMinLeaf || nr < kMinLeaf) continue;
          const double impurity = gini(left_pos, nl) * nl + gini(pos - left_pos, nr) * nr;
          const double gain = parent - impurity;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(j);
            best_categorical = false;
            best_threshold = 0.5 * (vals[k].first + vals[k + 1].first);
          }
        }
      } else {
        for (std::size_t level = 0; level < f.levels.size(); ++level) {
          double nl = 0, left_pos = 0;
          for (auto i : idx) {
            if (data_.rows()[i][j] == static_cast<double>(level)) {
              nl += 1;
              left_pos += data_.labels()[i];
            }
          }
          const double nr = total - nl;
          if (nl < kMinLeaf || nr < kMinLeaf) continue;
          const double impurity = gini(left_pos, nl) * nl + gini(pos - left_pos, nr) * nr;
          const double gain = parent - impurity;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(j);
            best_categorical = true;
            best_threshold = static_cast<double>(level);
          }
        }
      }
    }
    if (best_feature < 0) return at;

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      const double v = data_.rows()[i][static_cast<std::size_t>(best_feature)];
      bool go_left = best_categorical ? v == best_threshold : v < best_threshold;
      (go_left ? left : right).push_back(i);
    }
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(at)];
    node.feature = best_feature;
    node.categorical = best_categorical;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return at;
  }

  const TabularDataset& data_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogisticSurrogate: return "logistic_surrogate";
    case ModelKind::kTreeSurrogate: return "tree_surrogate";
    case ModelKind::kFunction: return "function";
  }
  return "?";
}

double FunctionModel::score(const Instance& x) const { return std::clamp(fn_(x), 0.0, 1.0); }

json FunctionModel::parameters() const { return {{"kind", "function"}, {"name", name_}}; }

std::shared_ptr<const Model> train_reference_model(const TabularDataset& data, ModelKind kind,
                                                   std::uint64_t seed) {
  require_both_labels(data);
  switch (kind) {
    case ModelKind::kLogisticSurrogate:
      return fit_logistic(data, seed);
    case ModelKind::kTreeSurrogate:
      return std::make_shared<TreeModel>(TreeBuilder(data).build(), seed);
    case ModelKind::kFunction:
      break;
  }
  throw Error(ErrorCode::kDegenerateData, "function models are not trainable");
}

double accuracy(const Model& model, const TabularDataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    hits += model.predict(data.rows()[i]) == data.labels()[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace xp::explain
