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

#include "xp/error.hpp"

namespace xp {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaError: return "schema_error";
    case ErrorCode::kDanglingReference: return "dangling_reference";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kUnknownUserGroup: return "unknown_user_group";
    case ErrorCode::kUnknownQuestion: return "unknown_question";
    case ErrorCode::kInvalidGraph: return "invalid_graph";
    case ErrorCode::kProtocolError: return "protocol_error";
    case ErrorCode::kHandlerError: return "handler_error";
    case ErrorCode::kDegenerateData: return "degenerate_data";
    case ErrorCode::kInvalidInstance: return "invalid_instance";
    case ErrorCode::kNoCounterfactualFound: return "no_counterfactual_found";
    case ErrorCode::kKTooLarge: return "k_too_large";
    case ErrorCode::kNoAnchorFound: return "no_anchor_found";
    case ErrorCode::kUnknownFeature: return "unknown_feature";
    case ErrorCode::kUnsupportedPayload: return "unsupported_payload";
    case ErrorCode::kUnknownFollowupEdge: return "unknown_followup_edge";
    case ErrorCode::kDuplicateActiveSession: return "duplicate_active_session";
    case ErrorCode::kUnknownSession: return "unknown_session";
    case ErrorCode::kIncompleteQuestionnaire: return "incomplete_questionnaire";
    case ErrorCode::kSessionNotEnded: return "session_not_ended";
    case ErrorCode::kEmptySession: return "empty_session";
    case ErrorCode::kSpecMismatch: return "spec_mismatch";
    case ErrorCode::kIoError: return "io_error";
  }
  return "unknown";
}

}  // namespace xp
