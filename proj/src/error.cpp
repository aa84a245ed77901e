// Copyright 2026 The Parlin Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "parlin/error.hpp"

namespace parlin {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kIo: return "i/o or schema error";
    case ErrorCode::kProtocol: return "protocol error";
    case ErrorCode::kWorkerFailure: return "worker failure";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kUsage: return "usage error";
  }
  return "unknown error";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return 1;
    case ErrorCode::kTimeout: return 3;
    case ErrorCode::kIo: return 4;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSingularSystem:
    case ErrorCode::kProtocol:
    case ErrorCode::kWorkerFailure:
      return 2;
  }
  return 2;
}

}  // namespace parlin
