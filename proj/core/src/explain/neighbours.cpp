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
#include <numeric>

#include "xp/error.hpp"
#include "xp/explain/techniques.hpp"

namespace xp::explain {

double gower_distance(const TabularDataset& data, const Instance& a, const Instance& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < data.feature_count(); ++j) {
    const auto& f = data.feature(j);
    if (f.kind == FeatureKind::kCategorical) {
      sum += a[j] == b[j] ? 0.0 : 1.0;
    } else if (f.range() > 0) {
      sum += std::abs(a[j] - b[j]) / f.range();
    }
  }
  return sum / static_cast<double>(data.feature_count());
}

ExplanationArtifact nearest_neighbours(const TabularDataset& data, const Instance& x, std::size_t k) {
  data.check_instance(x);
  if (k > data.size()) {
    throw Error(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " exceeds the " +
                                           std::to_string(data.size()) + " available rows");
  }
  std::vector<double> dist(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) dist[i] = gower_distance(data, x, data.rows()[i]);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t l, std::size_t r) { return dist[l] != dist[r] ? dist[l] < dist[r] : l < r; });

  Neighbours out;
  out.query = x;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t row = order[i];
    out.neighbours.push_back({row, data.labels()[row], dist[row]});
  }
  ExplanationArtifact a;
  a.type_id = "nearest_neighbour";
  a.payload = std::move(out);
  a.provenance.technique = "gower_knn";
  a.provenance.parameters = {{"k", k}, {"metric", "gower"}};
  return a;
}

}  // namespace xp::explain
