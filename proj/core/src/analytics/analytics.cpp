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

#include "xp/analytics/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "xp/error.hpp"
#include "xp/explain/dataset.hpp"

namespace xp::analytics {

using nlohmann::json;
using protocol::MoveKind;
using session::SessionAction;

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kAccept: return "accept";
    case Verdict::kRejectTooFast: return "reject_too_fast";
    case Verdict::kRejectInactive: return "reject_inactive";
  }
  return "?";
}

std::int64_t session_total_ms(const SessionRecord& record) {
  const auto& ev = record.events;
  if (ev.empty()) return 0;
  std::size_t last = ev.size() - 1;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const auto* action = std::get_if<SessionAction>(&ev[i].move);
    if (action && *action == SessionAction::kSubmitFreeText) {
      last = i == 0 ? 0 : i - 1;
      break;
    }
  }
  return ev[last].wall_time_ms - ev.front().wall_time_ms;
}

Verdict classify(std::int64_t total_ms, double estimated_minutes) {
  const auto estimate_ms = static_cast<std::int64_t>(std::llround(estimated_minutes * 60000.0));
  if (total_ms * 10 <= estimate_ms * 3) return Verdict::kRejectTooFast;
  if (total_ms >= estimate_ms * 4) return Verdict::kRejectInactive;
  return Verdict::kAccept;
}

std::vector<TimeFlag> flag_sessions(const std::vector<SessionRecord>& records, double estimated_minutes) {
  if (!(estimated_minutes > 0.0)) throw Error(ErrorCode::kSchemaError, "estimated minutes must be positive");
  std::vector<TimeFlag> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    TimeFlag f;
    f.session_id = r.session_id;
    f.total_ms = session_total_ms(r);
    f.total_minutes = static_cast<double>(f.total_ms) / 60000.0;
    f.verdict = classify(f.total_ms, estimated_minutes);
    out.push_back(std::move(f));
  }
  return out;
}

std::string to_string(const SegmentLabel& label) {
  switch (label.kind) {
    case LabelKind::kPersona: return "persona";
    case LabelKind::kTarget: return "target";
    case LabelKind::kIntentTopic: return "intent:" + std::string(iff::to_string(label.intent));
    case LabelKind::kExplanationType: return "explanation:" + label.type_id;
    case LabelKind::kFollowup: return "followup:" + std::string(iff::to_string(label.followup));
    case LabelKind::kEvaluation: return "evaluation";
  }
  return "?";
}

std::vector<SegmentLabel> event_labels(const SessionRecord& record, PathwayOptions options) {
  std::vector<SegmentLabel> labels;
  labels.reserve(record.events.size());
  std::optional<SegmentLabel> explanation;  // segment of the open explanation
  bool in_followup = false;  // an episode is open
  iff::FollowupKind followup = iff::FollowupKind::kComplement;
  iff::Intent intent = iff::Intent::kTransparency;

  auto followup_label = [&](iff::FollowupKind kind) {
    if (options.merge_followups && explanation) return *explanation;
    SegmentLabel l;
    l.kind = LabelKind::kFollowup;
    l.followup = kind;
    return l;
  };
  auto intent_label = [&] {
    SegmentLabel l;
    l.kind = LabelKind::kIntentTopic;
    l.intent = intent;
    return l;
  };

  for (const auto& e : record.events) {
    SegmentLabel label;
    if (const auto* action = std::get_if<SessionAction>(&e.move)) {
      switch (*action) {
        case SessionAction::kSelectPersona: label.kind = LabelKind::kPersona; break;
        case SessionAction::kPresentTarget: label.kind = LabelKind::kTarget; break;
        default: label.kind = LabelKind::kEvaluation; break;
      }
      labels.push_back(label);
      continue;
    }
    const auto& m = std::get<protocol::Move>(e.move);
    if (e.topic.kind == protocol::TopicKind::kIntent) intent = e.topic.intent;
    switch (m.kind) {
      case MoveKind::kBeginQuestion:
      case MoveKind::kReturnQuestion:
        explanation.reset();
        in_followup = false;
        label = intent_label();
        break;
      case MoveKind::kBeginExplanation:
        label = intent_label();
        break;
      case MoveKind::kExplain:
        if (in_followup) {
          label = followup_label(followup);
        } else {
          label.kind = LabelKind::kExplanationType;
          label.type_id = m.type_id;
          explanation = label;
        }
        break;
      case MoveKind::kFollowup:
        in_followup = true;
        followup = m.followup;
        label = followup_label(m.followup);
        break;
      case MoveKind::kAffirmComplement:
      case MoveKind::kAffirmReplacement:
      case MoveKind::kAffirmValidation:
        label = followup_label(followup);
        in_followup = false;
        break;
      case MoveKind::kEndExplanation:
        label = explanation ? *explanation : intent_label();
        explanation.reset();
        break;
      case MoveKind::kBeginArgument:
      case MoveKind::kChallenge:
      case MoveKind::kEndArgument:
        label = explanation ? *explanation : intent_label();
        break;
    }
    labels.push_back(label);
  }
  return labels;
}

std::vector<PathwaySegment> pathway(const SessionRecord& record, PathwayOptions options) {
  const auto& ev = record.events;
  if (ev.empty()) throw Error(ErrorCode::kEmptySession, "session '" + record.session_id + "' has no events");
  const auto labels = event_labels(record, options);
  std::vector<PathwaySegment> segments;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const std::int64_t duration = i + 1 < ev.size() ? std::max<std::int64_t>(0, ev[i + 1].wall_time_ms - ev[i].wall_time_ms) : 0;
    if (!segments.empty() && segments.back().label == labels[i]) {
      segments.back().duration_ms += duration;
      continue;
    }
    PathwaySegment s;
    s.session_id = record.session_id;
    s.order = segments.size();
    s.label = labels[i];
    s.duration_ms = duration;
    segments.push_back(std::move(s));
  }
  std::int64_t total = 0;
  for (const auto& s : segments) total += s.duration_ms;
  for (auto& s : segments) {
    s.fraction = total > 0 ? static_cast<double>(s.duration_ms) / static_cast<double>(total)
                           : 1.0 / static_cast<double>(segments.size());
  }
  return segments;
}

IntentCoverage intent_coverage(const std::vector<SessionRecord>& records) {
  IntentCoverage out;
  out.sessions = records.size();
  bool first = true;
  for (const auto& r : records) {
    std::set<std::string> intents;
    for (const auto& e : r.events) {
      const auto* m = std::get_if<protocol::Move>(&e.move);
      if (!m || (m->kind != MoveKind::kBeginQuestion && m->kind != MoveKind::kReturnQuestion)) continue;
      if (e.topic.kind == protocol::TopicKind::kIntent) intents.insert(std::string(iff::to_string(e.topic.intent)));
    }
    for (const auto& i : intents) ++out.sessions_per_intent[i];
    ++out.intents_per_session[intents.size()];
    out.min_intents = first ? intents.size() : std::min(out.min_intents, intents.size());
    first = false;
  }
  return out;
}

namespace {

void count_cohort(const std::vector<SessionRecord>& cohort, const std::vector<std::string>& items,
                  std::map<std::string, LevelCounts>& counts, std::string_view name) {
  for (const auto& item : items) counts[item] = LevelCounts{};
  for (const auto& r : cohort) {
    if (!r.questionnaire) {
      throw Error(ErrorCode::kSpecMismatch, "session '" + r.session_id + "' in cohort " + std::string(name) +
                                                " has no questionnaire");
    }
    for (const auto& item : items) {
      auto it = std::find_if(r.questionnaire->begin(), r.questionnaire->end(),
                             [&](const auto& resp) { return resp.item == item; });
      if (it == r.questionnaire->end()) {
        throw Error(ErrorCode::kSpecMismatch, "session '" + r.session_id + "' did not answer '" + item + "'");
      }
      if (it->value < 1 || it->value > 5) {
        throw Error(ErrorCode::kSpecMismatch, "session '" + r.session_id + "' answered '" + item + "' with " +
                                                  std::to_string(it->value));
      }
      ++counts[item][static_cast<std::size_t>(it->value - 1)];
    }
  }
}

}  // namespace

LikertDiff likert_diff(const std::vector<SessionRecord>& a, const std::vector<SessionRecord>& b) {
  LikertDiff out;
  for (const auto& item : session::satisfaction_scale().items) out.items.push_back(item.id);
  out.sessions_a = a.size();
  out.sessions_b = b.size();
  count_cohort(a, out.items, out.counts_a, "A");
  count_cohort(b, out.items, out.counts_b, "B");
  for (const auto& item : out.items) {
    LevelCounts d{};
    for (std::size_t l = 0; l < 5; ++l) d[l] = out.counts_b[item][l] - out.counts_a[item][l];
    out.diff[item] = d;
  }
  return out;
}

// ---- export ---------------------------------------------------------------------

std::string flags_csv(const std::vector<TimeFlag>& flags) {
  std::string out = "session_id,verdict,total_ms,total_minutes\n";
  for (const auto& f : flags) {
    out += f.session_id + "," + std::string(to_string(f.verdict)) + "," + std::to_string(f.total_ms) + "," +
           explain::format_number(f.total_minutes) + "\n";
  }
  return out;
}

json flags_json(const std::vector<TimeFlag>& flags) {
  json out = json::array();
  for (const auto& f : flags) {
    out.push_back({{"session_id", f.session_id},
                   {"verdict", std::string(to_string(f.verdict))},
                   {"total_ms", f.total_ms},
                   {"total_minutes", f.total_minutes}});
  }
  return out;
}

std::string pathways_csv(const std::vector<PathwaySegment>& segments) {
  std::string out = "session_id,order,label,duration_ms,fraction\n";
  for (const auto& s : segments) {
    out += s.session_id + "," + std::to_string(s.order) + "," + to_string(s.label) + "," +
           std::to_string(s.duration_ms) + "," + explain::format_number(s.fraction) + "\n";
  }
  return out;
}

json pathways_json(const std::vector<PathwaySegment>& segments) {
  json out = json::array();
  for (const auto& s : segments) {
    out.push_back({{"session_id", s.session_id},
                   {"order", s.order},
                   {"label", to_string(s.label)},
                   {"duration_ms", s.duration_ms},
                   {"fraction", s.fraction}});
  }
  return out;
}

std::string coverage_csv(const IntentCoverage& c) {
  std::string out = "intent,sessions\n";
  for (const auto& [intent, n] : c.sessions_per_intent) out += intent + "," + std::to_string(n) + "\n";
  return out;
}

json coverage_json(const IntentCoverage& c) {
  json per_session = json::object();
  for (const auto& [k, n] : c.intents_per_session) per_session[std::to_string(k)] = n;
  return json{{"sessions", c.sessions},
              {"sessions_per_intent", c.sessions_per_intent},
              {"intents_per_session", per_session},
              {"min_intents", c.min_intents}};
}

std::string likert_csv(const LikertDiff& d) {
  std::string out = "item,level_1,level_2,level_3,level_4,level_5\n";
  for (const auto& item : d.items) {
    out += item;
    for (int v : d.diff.at(item)) out += "," + std::to_string(v);
    out += "\n";
  }
  return out;
}

json likert_json(const LikertDiff& d) {
  auto table = [&](const std::map<std::string, LevelCounts>& m) {
    json t = json::object();
    for (const auto& item : d.items) t[item] = m.at(item);
    return t;
  };
  return json{{"items", d.items},
              {"sessions_a", d.sessions_a},
              {"sessions_b", d.sessions_b},
              {"counts_a", table(d.counts_a)},
              {"counts_b", table(d.counts_b)},
              {"diff", table(d.diff)}};
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

}  // namespace xp::analytics
