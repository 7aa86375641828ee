/* Copyright 2026 The TokenBudget Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tokenbudget {

enum class ErrorCode {
  kInvalidConfig,
  kEmptyScores,
  kInvalidScore,
  kBudgetInfeasible,
  kTruncationOutOfRange,
  kDimensionMismatch,
  kEmptySegment,
  kPlanMismatch,
  kBudgetExceeded,
  kParseError,
  kNoEvidence,
  kDivisionByZero,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library. `offset()` is the byte offset into
// the offending document for kParseError and zero otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t offset = 0)
      : std::runtime_error(message), code_(code), offset_(offset) {}

  ErrorCode code() const { return code_; }
  std::size_t offset() const { return offset_; }

 private:
  ErrorCode code_;
  std::size_t offset_;
};

}  // namespace tokenbudget
