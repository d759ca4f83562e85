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

#include "xp/explain/techniques.hpp"

namespace xp::explain {

namespace {

constexpr std::size_t kNumericBins = 10;

std::string bin_label(double lo, double hi, bool last) {
  return "[" + format_number(lo) + ", " + format_number(hi) + (last ? "]" : ")");
}

}  // namespace

ExplanationArtifact dataset_stats(const TabularDataset& data, std::string_view feature) {
  const std::size_t j = data.feature_index(feature);
  const auto& f = data.feature(j);
  DatasetStats s;
  s.feature = f.name;
  s.kind = f.kind;
  s.count = data.size();

  if (f.kind == FeatureKind::kCategorical) {
    for (const auto& level : f.levels) s.bins.push_back({level, 0.0, 0.0, 0});
    for (const auto& row : data.rows()) ++s.bins[static_cast<std::size_t>(row[j])].count;
    if (s.count > 0) {
      auto it = std::max_element(s.bins.begin(), s.bins.end(),
                                 [](const HistogramBin& l, const HistogramBin& r) { return l.count < r.count; });
      s.mode = it->label;
    }
  } else if (s.count > 0) {
    double lo = data.rows().front()[j], hi = lo, sum = 0.0;
    for (const auto& row : data.rows()) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
      sum += row[j];
    }
    s.mean = sum / static_cast<double>(s.count);
    s.min = lo;
    s.max = hi;
    if (hi == lo) {
      s.bins.push_back({bin_label(lo, hi, true), lo, hi, s.count});
    } else {
      const double width = (hi - lo) / kNumericBins;
      for (std::size_t b = 0; b < kNumericBins; ++b) {
        const double b_lo = lo + width * static_cast<double>(b);
        const double b_hi = b + 1 == kNumericBins ? hi : lo + width * static_cast<double>(b + 1);
        s.bins.push_back({bin_label(b_lo, b_hi, b + 1 == kNumericBins), b_lo, b_hi, 0});
      }
      for (const auto& row : data.rows()) {
        auto b = static_cast<std::size_t>((row[j] - lo) / width);
        ++s.bins[std::min(b, kNumericBins - 1)].count;
      }
    }
  }

  ExplanationArtifact a;
  a.type_id = "dataset_statistics";
  a.payload = std::move(s);
  a.provenance.technique = "histogram_stats";
  a.provenance.parameters = {{"feature", f.name}, {"bins", f.kind == FeatureKind::kNumeric ? kNumericBins : f.levels.size()}};
  return a;
}

}  // namespace xp::explain
