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

#include <stdexcept>
#include <string>
#include <string_view>

namespace xp {

// Every failure raised by the library carries one of these codes so that
// callers (CLI, socket server) can map them to stable identifiers.
enum class ErrorCode {
  kSchemaError,
  kDanglingReference,
  kDuplicateId,
  kUnknownUserGroup,
  kUnknownQuestion,
  kInvalidGraph,
  kProtocolError,
  kHandlerError,
  kDegenerateData,
  kInvalidInstance,
  kNoCounterfactualFound,
  kKTooLarge,
  kNoAnchorFound,
  kUnknownFeature,
  kUnsupportedPayload,
  kUnknownFollowupEdge,
  kDuplicateActiveSession,
  kUnknownSession,
  kIncompleteQuestionnaire,
  kSessionNotEnded,
  kEmptySession,
  kSpecMismatch,
  kIoError,
};

// Stable snake_case identifier, e.g. "dangling_reference".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xp
