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

// Session persistence. Event and artifact logs are append-only; the record
// header (participant, group, questionnaire) is replaced atomically when the
// session is finalised.
//
// FileStore layout under its directory:
//   index.jsonl               {"session_id", "status": "created"|"finalized", "at"}
//   <id>.events.jsonl         one InteractionEvent per line
//   <id>.artifacts.jsonl      one ExplanationArtifact per line
//   <id>.record.json          record_header_json

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "xp/explain/artifact.hpp"
#include "xp/session/events.hpp"

namespace xp::session {

class SessionStore {
 public:
  virtual ~SessionStore() = default;

  // Throws kDuplicateId when the session already exists.
  virtual void create(const SessionRecord& header) = 0;
  // Events must continue the session's seq order. Throws kUnknownSession.
  virtual void append_events(const std::string& session_id, const std::vector<InteractionEvent>& events) = 0;
  virtual void append_artifact(const std::string& session_id, const explain::ExplanationArtifact& artifact) = 0;
  // Replaces the header; events are left untouched.
  virtual void finalize(const SessionRecord& record) = 0;

  virtual std::vector<std::string> session_ids() const = 0;
  // Header plus events. Throws kUnknownSession.
  virtual SessionRecord load(const std::string& session_id) const = 0;
  virtual std::vector<explain::ExplanationArtifact> artifacts(const std::string& session_id) const = 0;
};

class MemoryStore : public SessionStore {
 public:
  void create(const SessionRecord& header) override;
  void append_events(const std::string& session_id, const std::vector<InteractionEvent>& events) override;
  void append_artifact(const std::string& session_id, const explain::ExplanationArtifact& artifact) override;
  void finalize(const SessionRecord& record) override;
  std::vector<std::string> session_ids() const override;
  SessionRecord load(const std::string& session_id) const override;
  std::vector<explain::ExplanationArtifact> artifacts(const std::string& session_id) const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, SessionRecord> records_;
  std::map<std::string, std::vector<explain::ExplanationArtifact>> artifacts_;
};

class FileStore : public SessionStore {
 public:
  // Creates the directory when missing. Throws kIoError.
  explicit FileStore(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return dir_; }

  void create(const SessionRecord& header) override;
  void append_events(const std::string& session_id, const std::vector<InteractionEvent>& events) override;
  void append_artifact(const std::string& session_id, const explain::ExplanationArtifact& artifact) override;
  void finalize(const SessionRecord& record) override;
  std::vector<std::string> session_ids() const override;
  SessionRecord load(const std::string& session_id) const override;
  std::vector<explain::ExplanationArtifact> artifacts(const std::string& session_id) const override;

 private:
  struct Appender {
    std::mutex mutex;
    std::ofstream events;
    std::ofstream artifacts;
    std::optional<std::uint64_t> last_seq;
  };

  Appender& appender(const std::string& session_id);
  void append_index(const std::string& session_id, std::string_view status, std::int64_t at_ms);
  void write_header(const SessionRecord& record);

  std::filesystem::path dir_;
  mutable std::mutex mutex_;  // guards appenders_ and the index file
  std::map<std::string, std::unique_ptr<Appender>> appenders_;
};

// Reads every session in a FileStore directory, ordered by session id.
// Throws kIoError or kSchemaError.
std::vector<SessionRecord> load_records(const std::filesystem::path& directory);

// Events of one JSONL file. Blank lines are skipped.
std::vector<InteractionEvent> read_event_log(const std::filesystem::path& path);

}  // namespace xp::session
