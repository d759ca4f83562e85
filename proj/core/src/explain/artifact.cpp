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

#include "xp/explain/artifact.hpp"

#include "xp/error.hpp"

namespace xp::explain {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kSchemaError, std::string("artifact is missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kSchemaError, std::string("artifact field '") + key + "' has the wrong type");
  }
}

std::optional<double> opt_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

json payload_json(const Payload& payload) {
  json p;
  p["kind"] = std::string(to_string(payload_kind(payload)));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FeatureAttribution>) {
          json weights = json::array();
          for (const auto& w : v.weights) weights.push_back({{"feature", w.feature}, {"weight", w.weight}});
          p["weights"] = std::move(weights);
          p["baseline_score"] = v.baseline_score;
          p["instance_score"] = v.instance_score;
        } else if constexpr (std::is_same_v<T, Counterfactual>) {
          json changes = json::array();
          for (const auto& c : v.changes) {
            changes.push_back({{"feature", c.feature}, {"old", c.old_value}, {"new", c.new_value},
                               {"old_text", c.old_text}, {"new_text", c.new_text}});
          }
          p["changes"] = std::move(changes);
          p["original_label"] = v.original_label;
          p["new_label"] = v.new_label;
          p["point"] = v.point;
          p["cost"] = v.cost;
        } else if constexpr (std::is_same_v<T, Neighbours>) {
          json rows = json::array();
          for (const auto& n : v.neighbours) {
            rows.push_back({{"row", n.row}, {"label", n.label}, {"distance", n.distance}});
          }
          p["query"] = v.query;
          p["neighbours"] = std::move(rows);
        } else if constexpr (std::is_same_v<T, AnchorRule>) {
          json preds = json::array();
          for (const auto& pr : v.predicates) {
            preds.push_back({{"feature", pr.feature}, {"feature_index", pr.feature_index},
                             {"op", std::string(to_string(pr.op))}, {"value", pr.value}});
          }
          p["predicates"] = std::move(preds);
          p["prediction"] = v.prediction;
          p["precision"] = v.precision;
          p["coverage"] = v.coverage;
          p["samples"] = v.samples;
        } else if constexpr (std::is_same_v<T, DatasetStats>) {
          json bins = json::array();
          for (const auto& b : v.bins) {
            json bin = {{"label", b.label}, {"count", b.count}};
            if (v.kind == FeatureKind::kNumeric) {
              bin["lo"] = b.lo;
              bin["hi"] = b.hi;
            }
            bins.push_back(std::move(bin));
          }
          p["feature"] = v.feature;
          p["feature_kind"] = v.kind == FeatureKind::kNumeric ? "numeric" : "categorical";
          p["bins"] = std::move(bins);
          p["count"] = v.count;
          if (v.mean) p["mean"] = *v.mean;
          if (v.min) p["min"] = *v.min;
          if (v.max) p["max"] = *v.max;
          if (v.mode) p["mode"] = *v.mode;
        } else {
          p["text"] = v.text;
          p["annotates"] = v.annotates;
        }
      },
      payload);
  return p;
}

Payload payload_from_json(const json& p) {
  const auto kind = field<std::string>(p, "kind");
  if (kind == "feature_attribution") {
    FeatureAttribution v;
    for (const auto& w : field<json>(p, "weights")) {
      v.weights.push_back({field<std::string>(w, "feature"), field<double>(w, "weight")});
    }
    v.baseline_score = field<double>(p, "baseline_score");
    v.instance_score = field<double>(p, "instance_score");
    return v;
  }
  if (kind == "counterfactual") {
    Counterfactual v;
    for (const auto& c : field<json>(p, "changes")) {
      v.changes.push_back({field<std::string>(c, "feature"), field<double>(c, "old"),
                           field<double>(c, "new"), field<std::string>(c, "old_text"),
                           field<std::string>(c, "new_text")});
    }
    v.original_label = field<int>(p, "original_label");
    v.new_label = field<int>(p, "new_label");
    v.point = field<Instance>(p, "point");
    v.cost = field<double>(p, "cost");
    return v;
  }
  if (kind == "neighbours") {
    Neighbours v;
    v.query = field<Instance>(p, "query");
    for (const auto& n : field<json>(p, "neighbours")) {
      v.neighbours.push_back({field<std::size_t>(n, "row"), field<int>(n, "label"), field<double>(n, "distance")});
    }
    return v;
  }
  if (kind == "anchor_rule") {
    AnchorRule v;
    for (const auto& pr : field<json>(p, "predicates")) {
      Predicate pred;
      pred.feature = field<std::string>(pr, "feature");
      pred.feature_index = field<std::size_t>(pr, "feature_index");
      const auto op = field<std::string>(pr, "op");
      if (op == "lt") pred.op = PredicateOp::kLess;
      else if (op == "ge") pred.op = PredicateOp::kGreaterEqual;
      else if (op == "eq") pred.op = PredicateOp::kEqual;
      else throw Error(ErrorCode::kSchemaError, "unknown predicate op '" + op + "'");
      pred.value = field<double>(pr, "value");
      v.predicates.push_back(std::move(pred));
    }
    v.prediction = field<int>(p, "prediction");
    v.precision = field<double>(p, "precision");
    v.coverage = field<double>(p, "coverage");
    v.samples = field<std::size_t>(p, "samples");
    return v;
  }
  if (kind == "dataset_stats") {
    DatasetStats v;
    v.feature = field<std::string>(p, "feature");
    v.kind = field<std::string>(p, "feature_kind") == "numeric" ? FeatureKind::kNumeric : FeatureKind::kCategorical;
    for (const auto& b : field<json>(p, "bins")) {
      HistogramBin bin;
      bin.label = field<std::string>(b, "label");
      bin.count = field<std::size_t>(b, "count");
      bin.lo = b.value("lo", 0.0);
      bin.hi = b.value("hi", 0.0);
      v.bins.push_back(std::move(bin));
    }
    v.count = field<std::size_t>(p, "count");
    v.mean = opt_number(p, "mean");
    v.min = opt_number(p, "min");
    v.max = opt_number(p, "max");
    if (p.contains("mode")) v.mode = p["mode"].get<std::string>();
    return v;
  }
  if (kind == "text_annotation") {
    return TextAnnotation{field<std::string>(p, "text"), field<std::string>(p, "annotates")};
  }
  throw Error(ErrorCode::kSchemaError, "unknown payload kind '" + kind + "'");
}

}  // namespace

std::string_view to_string(PredicateOp op) {
  switch (op) {
    case PredicateOp::kLess: return "lt";
    case PredicateOp::kGreaterEqual: return "ge";
    case PredicateOp::kEqual: return "eq";
  }
  return "?";
}

bool Predicate::holds(const Instance& x) const {
  const double v = x[feature_index];
  switch (op) {
    case PredicateOp::kLess: return v < value;
    case PredicateOp::kGreaterEqual: return v >= value;
    case PredicateOp::kEqual: return v == value;
  }
  return false;
}

bool AnchorRule::holds(const Instance& x) const {
  for (const auto& p : predicates) {
    if (!p.holds(x)) return false;
  }
  return true;
}

std::string_view to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kFeatureAttribution: return "feature_attribution";
    case PayloadKind::kCounterfactual: return "counterfactual";
    case PayloadKind::kNeighbours: return "neighbours";
    case PayloadKind::kAnchorRule: return "anchor_rule";
    case PayloadKind::kDatasetStats: return "dataset_stats";
    case PayloadKind::kTextAnnotation: return "text_annotation";
  }
  return "?";
}

PayloadKind payload_kind(const Payload& payload) { return static_cast<PayloadKind>(payload.index()); }

json to_json(const ExplanationArtifact& a) {
  json j;
  j["id"] = a.id;
  j["type"] = a.type_id;
  j["payload"] = payload_json(a.payload);
  j["provenance"] = {{"technique", a.provenance.technique},
                     {"parameters", a.provenance.parameters},
                     {"seed", a.provenance.seed}};
  if (a.agreement) {
    j["agreement"] = {{"metric", a.agreement->metric},
                      {"score", a.agreement->score},
                      {"validates", a.agreement->validates}};
  }
  return j;
}

ExplanationArtifact artifact_from_json(const json& j) {
  ExplanationArtifact a;
  a.id = field<std::string>(j, "id");
  a.type_id = field<std::string>(j, "type");
  a.payload = payload_from_json(field<json>(j, "payload"));
  const json prov = field<json>(j, "provenance");
  a.provenance.technique = field<std::string>(prov, "technique");
  a.provenance.parameters = prov.value("parameters", json::object());
  a.provenance.seed = field<std::uint64_t>(prov, "seed");
  if (j.contains("agreement")) {
    const json& ag = j["agreement"];
    a.agreement = Agreement{field<std::string>(ag, "metric"), field<double>(ag, "score"),
                            field<std::string>(ag, "validates")};
  }
  return a;
}

}  // namespace xp::explain
