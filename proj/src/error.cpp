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

#include "tokenbudget/error.h"

namespace tokenbudget {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kEmptyScores:
      return "EmptyScores";
    case ErrorCode::kInvalidScore:
      return "InvalidScore";
    case ErrorCode::kBudgetInfeasible:
      return "BudgetInfeasible";
    case ErrorCode::kTruncationOutOfRange:
      return "TruncationOutOfRange";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kEmptySegment:
      return "EmptySegment";
    case ErrorCode::kPlanMismatch:
      return "PlanMismatch";
    case ErrorCode::kBudgetExceeded:
      return "BudgetExceeded";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kNoEvidence:
      return "NoEvidence";
    case ErrorCode::kDivisionByZero:
      return "DivisionByZero";
  }
  return "Unknown";
}

}  // namespace tokenbudget
