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

#include "xp/session/store.hpp"

#include <algorithm>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "xp/error.hpp"

namespace xp::session {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void io_error(const std::string& message) { throw Error(ErrorCode::kIoError, message); }

// Returns the seq of the last event after appending `events`.
std::optional<std::uint64_t> check_seq(std::optional<std::uint64_t> last,
                                       const std::vector<InteractionEvent>& events) {
  for (const auto& e : events) {
    if (last && e.seq <= *last) {
      throw Error(ErrorCode::kSchemaError, "event seq " + std::to_string(e.seq) + " does not follow " +
                                               std::to_string(*last));
    }
    last = e.seq;
  }
  return last;
}

std::optional<std::uint64_t> last_seq(const std::vector<InteractionEvent>& events) {
  if (events.empty()) return std::nullopt;
  return events.back().seq;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool is_session_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
  });
}

// Sessions are identified by their record header files.
std::vector<std::string> list_session_ids(const fs::path& dir) {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    constexpr std::string_view suffix = ".record.json";
    if (name.size() > suffix.size() && name.ends_with(suffix)) ids.push_back(name.substr(0, name.size() - suffix.size()));
  }
  if (ec) io_error("cannot list " + dir.string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

// ---- MemoryStore ----------------------------------------------------------------

void MemoryStore::create(const SessionRecord& header) {
  std::lock_guard lock(mutex_);
  if (records_.contains(header.session_id)) {
    throw Error(ErrorCode::kDuplicateId, "session '" + header.session_id + "' already exists");
  }
  SessionRecord r = header;
  r.events.clear();
  records_.emplace(r.session_id, std::move(r));
}

void MemoryStore::append_events(const std::string& session_id, const std::vector<InteractionEvent>& events) {
  std::lock_guard lock(mutex_);
  auto it = records_.find(session_id);
  if (it == records_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  check_seq(last_seq(it->second.events), events);
  it->second.events.insert(it->second.events.end(), events.begin(), events.end());
}

void MemoryStore::append_artifact(const std::string& session_id, const explain::ExplanationArtifact& artifact) {
  std::lock_guard lock(mutex_);
  if (!records_.contains(session_id)) throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  artifacts_[session_id].push_back(artifact);
}

void MemoryStore::finalize(const SessionRecord& record) {
  std::lock_guard lock(mutex_);
  auto it = records_.find(record.session_id);
  if (it == records_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session '" + record.session_id + "'");
  auto events = std::move(it->second.events);
  it->second = record;
  it->second.events = std::move(events);
}

std::vector<std::string> MemoryStore::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, r] : records_) ids.push_back(id);
  return ids;
}

SessionRecord MemoryStore::load(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(session_id);
  if (it == records_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  return it->second;
}

std::vector<explain::ExplanationArtifact> MemoryStore::artifacts(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  if (!records_.contains(session_id)) throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  auto it = artifacts_.find(session_id);
  return it == artifacts_.end() ? std::vector<explain::ExplanationArtifact>{} : it->second;
}

// ---- FileStore ------------------------------------------------------------------

FileStore::FileStore(fs::path directory) : dir_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) io_error("cannot create data directory " + dir_.string());
}

void FileStore::append_index(const std::string& session_id, std::string_view status, std::int64_t at_ms) {
  std::ofstream index(dir_ / "index.jsonl", std::ios::app | std::ios::binary);
  if (!index) io_error("cannot open index in " + dir_.string());
  index << json{{"session_id", session_id}, {"status", status}, {"at", format_utc_ms(at_ms)}}.dump() << '\n';
  index.flush();
  if (!index) io_error("cannot write index in " + dir_.string());
}

void FileStore::write_header(const SessionRecord& record) {
  const fs::path target = dir_ / (record.session_id + ".record.json");
  const fs::path tmp = dir_ / (record.session_id + ".record.json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) io_error("cannot write " + tmp.string());
    out << record_header_json(record).dump(2) << '\n';
    out.flush();
    if (!out) io_error("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) io_error("cannot replace " + target.string() + ": " + ec.message());
}

void FileStore::create(const SessionRecord& header) {
  if (!is_session_id(header.session_id)) {
    throw Error(ErrorCode::kSchemaError, "session id '" + header.session_id + "' is not a safe file name");
  }
  std::lock_guard lock(mutex_);
  if (appenders_.contains(header.session_id) || fs::exists(dir_ / (header.session_id + ".record.json"))) {
    throw Error(ErrorCode::kDuplicateId, "session '" + header.session_id + "' already exists");
  }
  auto app = std::make_unique<Appender>();
  app->events.open(dir_ / (header.session_id + ".events.jsonl"), std::ios::app | std::ios::binary);
  app->artifacts.open(dir_ / (header.session_id + ".artifacts.jsonl"), std::ios::app | std::ios::binary);
  if (!app->events || !app->artifacts) io_error("cannot open logs for " + header.session_id);
  SessionRecord r = header;
  r.events.clear();
  write_header(r);
  append_index(header.session_id, "created", header.started_at_ms);
  appenders_.emplace(header.session_id, std::move(app));
}

FileStore::Appender& FileStore::appender(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  auto it = appenders_.find(session_id);
  if (it != appenders_.end()) return *it->second;
  // A session created by an earlier store on the same directory.
  if (!is_session_id(session_id) || !fs::exists(dir_ / (session_id + ".record.json"))) {
    throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  }
  auto app = std::make_unique<Appender>();
  const fs::path events = dir_ / (session_id + ".events.jsonl");
  if (fs::exists(events)) app->last_seq = last_seq(read_event_log(events));
  app->events.open(events, std::ios::app | std::ios::binary);
  app->artifacts.open(dir_ / (session_id + ".artifacts.jsonl"), std::ios::app | std::ios::binary);
  if (!app->events || !app->artifacts) io_error("cannot open logs for " + session_id);
  return *appenders_.emplace(session_id, std::move(app)).first->second;
}

void FileStore::append_events(const std::string& session_id, const std::vector<InteractionEvent>& events) {
  auto& app = appender(session_id);
  std::lock_guard lock(app.mutex);
  for (const auto& e : events) {
    if (e.session_id != session_id) throw Error(ErrorCode::kSchemaError, "event belongs to another session");
  }
  app.last_seq = check_seq(app.last_seq, events);
  for (const auto& e : events) app.events << to_jsonl_line(e) << '\n';
  app.events.flush();
  if (!app.events) io_error("cannot append events for " + session_id);
}

void FileStore::append_artifact(const std::string& session_id, const explain::ExplanationArtifact& artifact) {
  auto& app = appender(session_id);
  std::lock_guard lock(app.mutex);
  app.artifacts << explain::to_json(artifact).dump() << '\n';
  app.artifacts.flush();
  if (!app.artifacts) io_error("cannot append artifact for " + session_id);
}

void FileStore::finalize(const SessionRecord& record) {
  auto& app = appender(record.session_id);
  {
    std::lock_guard lock(app.mutex);
    app.events.flush();
    app.artifacts.flush();
    write_header(record);
  }
  std::lock_guard lock(mutex_);
  append_index(record.session_id, "finalized", record.finalized_at_ms.value_or(record.started_at_ms));
}

std::vector<std::string> FileStore::session_ids() const {
  return list_session_ids(dir_);
}

SessionRecord FileStore::load(const std::string& session_id) const {
  const fs::path header = dir_ / (session_id + ".record.json");
  if (!fs::exists(header)) throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  json j = json::parse(read_file(header), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kSchemaError, header.string() + " is not valid JSON");
  SessionRecord r = record_from_header_json(j);
  const fs::path events = dir_ / (session_id + ".events.jsonl");
  if (fs::exists(events)) r.events = read_event_log(events);
  return r;
}

std::vector<explain::ExplanationArtifact> FileStore::artifacts(const std::string& session_id) const {
  const fs::path path = dir_ / (session_id + ".artifacts.jsonl");
  if (!fs::exists(dir_ / (session_id + ".record.json"))) {
    throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  }
  std::vector<explain::ExplanationArtifact> out;
  if (!fs::exists(path)) return out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kSchemaError, "malformed artifact line in " + path.string());
    out.push_back(explain::artifact_from_json(j));
  }
  return out;
}

std::vector<InteractionEvent> read_event_log(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<InteractionEvent> events;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kSchemaError, path.string() + ":" + std::to_string(number) + ": not valid JSON");
    }
    events.push_back(event_from_json(j));
  }
  return events;
}

std::vector<SessionRecord> load_records(const fs::path& directory) {
  if (!fs::is_directory(directory)) io_error(directory.string() + " is not a directory");
  std::vector<SessionRecord> out;
  for (const auto& id : list_session_ids(directory)) {
    const fs::path header = directory / (id + ".record.json");
    json j = json::parse(read_file(header), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kSchemaError, header.string() + " is not valid JSON");
    SessionRecord r = record_from_header_json(j);
    const fs::path events = directory / (id + ".events.jsonl");
    if (fs::exists(events)) r.events = read_event_log(events);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace xp::session
