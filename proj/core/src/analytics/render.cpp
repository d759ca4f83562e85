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
#include <string>
#include <vector>

#include "xp/analytics/analytics.hpp"

namespace xp::analytics {

namespace {

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(long long v) { return std::to_string(v); }

}  // namespace

std::string_view css_class(LabelKind kind) {
  switch (kind) {
    case LabelKind::kPersona: return "seg-persona";
    case LabelKind::kTarget: return "seg-target";
    case LabelKind::kIntentTopic: return "seg-intent";
    case LabelKind::kExplanationType: return "seg-explanation";
    case LabelKind::kFollowup: return "seg-followup";
    case LabelKind::kEvaluation: return "seg-evaluation";
  }
  return "seg";
}

std::string render_pathways_svg(const std::vector<PathwaySegment>& segments, RenderOptions o) {
  // Group by session, keeping first-appearance order.
  std::vector<std::string> order;
  std::vector<std::vector<const PathwaySegment*>> rows;
  for (const auto& s : segments) {
    std::size_t idx = 0;
    while (idx < order.size() && order[idx] != s.session_id) ++idx;
    if (idx == order.size()) {
      order.push_back(s.session_id);
      rows.emplace_back();
    }
    rows[idx].push_back(&s);
  }

  const long long width = o.label_width + o.row_width + 10;
  const long long height = static_cast<long long>(rows.size()) * (o.row_height + o.row_gap) + o.row_gap;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  svg +=
      "<style>\n"
      "text{font-family:sans-serif;font-size:11px;fill:#222}\n"
      ".seg-persona{fill:#9e9e9e}\n"
      ".seg-target{fill:#607d8b}\n"
      ".seg-intent{fill:#ffb74d}\n"
      ".seg-explanation{fill:#4fc3f7}\n"
      ".seg-followup{fill:#81c784}\n"
      ".seg-evaluation{fill:#ba68c8}\n"
      "</style>\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const long long y = o.row_gap + static_cast<long long>(r) * (o.row_height + o.row_gap);
    svg += "<g class=\"session\" data-session=\"" + escape(order[r]) + "\">\n";
    svg += "<text x=\"0\" y=\"" + num(y + o.row_height - 5) + "\">" + escape(order[r]) + "</text>\n";
    double cumulative = 0.0;
    long long left = 0;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      const auto& s = *rows[r][i];
      cumulative += s.fraction;
      // The last edge is pinned so that rounding never changes the bar width.
      const long long right = i + 1 == rows[r].size() ? o.row_width : std::llround(cumulative * o.row_width);
      const long long w = std::max(0LL, right - left);
      const std::string label = to_string(s.label);
      svg += "<rect class=\"" + std::string(css_class(s.label.kind)) + "\" x=\"" + num(o.label_width + left) +
             "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(o.row_height) + "\" data-label=\"" +
             escape(label) + "\"><title>" + escape(label) + " " + num(s.duration_ms) + " ms</title></rect>\n";
      left = std::max(left, right);
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace xp::analytics
