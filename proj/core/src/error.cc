// Copyright 2026 The privcomp Authors
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

#include "privcomp/error.h"

#include <string>

namespace privcomp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotPrime: return "NotPrime";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kNotSquare: return "NotSquare";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kUnknownMessage: return "UnknownMessage";
    case ErrorCode::kAllocatorExhausted: return "AllocatorExhausted";
    case ErrorCode::kMissingSource: return "MissingSource";
    case ErrorCode::kInvalidTuple: return "InvalidTuple";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kFieldTooSmall: return "FieldTooSmall";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kParameterMismatch: return "ParameterMismatch";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kIncompleteAnswers: return "IncompleteAnswers";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kFileError: return "FileError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kBindError: return "BindError";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace privcomp
