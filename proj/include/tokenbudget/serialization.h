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

#include <string>
#include <string_view>

#include "tokenbudget/allocation.h"
#include "tokenbudget/assembly.h"

namespace tokenbudget {

// Compact JSON with keys "b_base", "b_res", "budgets", "stage", "total" in
// that (sorted) order. This is the canonical plan document.
std::string serialize_plan(const AllocationPlan& plan);

// Strict inverse of serialize_plan. Unknown or missing fields, wrong types,
// an unknown stage and total != sum(budgets) all raise kParseError carrying
// the byte offset of the problem.
AllocationPlan parse_plan(std::string_view document);

// Assembled sequence as JSON: {"entries": [{"segment_index", "tag",
// "token_count", "atom_ids", "rows"}], "dim", "total_tokens"}.
std::string serialize_sequence(const AssembledSequence& seq);
AssembledSequence parse_sequence(std::string_view document);

}  // namespace tokenbudget
