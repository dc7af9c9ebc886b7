// Copyright 2026 The judgekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "judgekit/errors.hpp"

namespace judgekit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kSelection: return "selection";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kAuth: return "auth";
    case ErrorCode::kRateLimited: return "rate_limited";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kMalformedPayload: return "malformed_payload";
    case ErrorCode::kScoringFailed: return "scoring_failed";
    case ErrorCode::kRefused: return "refused";
  }
  return "unknown";
}

}  // namespace judgekit
