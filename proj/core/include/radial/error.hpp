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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace radial {

enum class ErrorCode {
  kZeroVector,
  kDimensionMismatch,
  kDegenerateAngle,
  kCountMismatch,
  kEmptyBatch,
  kMissingNegatives,
  kKeyNotFound,
  kNonFiniteLoss,
  kEmptyCandidates,
  kBadK,
  kBadGroundTruth,
  kDegenerateInput,
  kOrderViolation,
  kGridMisconfigured,
  kCorruptHeader,
  kDuplicateKey,
  kTruncatedFile,
  kNonFiniteValue,
  kSchemaError,
  kIoError,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Where in an input an error was detected. Fields are filled only when they
// are meaningful for the failing reader.
struct Location {
  std::optional<std::uint64_t> byte_offset{};
  std::optional<std::size_t> line{};
  std::optional<std::string> key{};
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, Location location = {});

  ErrorCode code() const noexcept { return code_; }
  const Location& location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  Location location_;
};

}  // namespace radial
