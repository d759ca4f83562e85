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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "xp/explain/dataset.hpp"

namespace xp::explain {

enum class ModelKind { kLogisticSurrogate, kTreeSurrogate, kFunction };
std::string_view to_string(ModelKind kind);

// Binary classifier. score() is the probability of approval and always lies
// in [0, 1]; predict(x) == 1 exactly when score(x) >= 0.5.
class Model {
 public:
  virtual ~Model() = default;

  virtual double score(const Instance& x) const = 0;
  virtual ModelKind kind() const = 0;
  // Learned parameters, for reproducibility checks and provenance.
  virtual nlohmann::json parameters() const = 0;

  int predict(const Instance& x) const { return score(x) >= 0.5 ? kApproved : kRejected; }
};

// Wraps an arbitrary scoring function. Scores are clamped to [0, 1].
class FunctionModel : public Model {
 public:
  explicit FunctionModel(std::function<double(const Instance&)> fn, std::string name = "function")
      : fn_(std::move(fn)), name_(std::move(name)) {}

  double score(const Instance& x) const override;
  ModelKind kind() const override { return ModelKind::kFunction; }
  nlohmann::json parameters() const override;

 private:
  std::function<double(const Instance&)> fn_;
  std::string name_;
};

// Fits the reference classifier. Logistic: standardised numeric features and
// one-hot categorical levels, L2-regularised Newton iterations. Tree: CART
// with Gini splits, depth 5, leaves of at least 5 rows; leaf score is the
// fraction of approved rows. Both are deterministic; `seed` is recorded with
// the parameters.
//
// Throws kDegenerateData unless both labels are present.
std::shared_ptr<const Model> train_reference_model(const TabularDataset& data, ModelKind kind,
                                                   std::uint64_t seed);

double accuracy(const Model& model, const TabularDataset& data);

}  // namespace xp::explain
