// Copyright 2026 The Radial Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "radial/error.hpp"

namespace radial {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateAngle: return "DegenerateAngle";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kMissingNegatives: return "MissingNegatives";
    case ErrorCode::kKeyNotFound: return "KeyNotFound";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kBadGroundTruth: return "BadGroundTruth";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kOrderViolation: return "OrderViolation";
    case ErrorCode::kGridMisconfigured: return "GridMisconfigured";
    case ErrorCode::kCorruptHeader: return "CorruptHeader";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, const Location& loc) {
  std::string out(to_string(code));
  out += ": ";
  out += message;
  if (loc.line) out += " (line " + std::to_string(*loc.line) + ")";
  if (loc.byte_offset) out += " (byte offset " + std::to_string(*loc.byte_offset) + ")";
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, Location location)
    : std::runtime_error(decorate(code, message, location)),
      code_(code),
      location_(std::move(location)) {}

}  // namespace radial
