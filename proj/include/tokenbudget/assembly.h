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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokenbudget/allocation.h"
#include "tokenbudget/memory_block.h"

namespace tokenbudget {

struct PipelineConfig {
  double fps = 2.0;
  // Frames per segment.
  int window = 8;
  int f_max = 1024;
  int b_max = 4096;

  void validate() const;
};

struct SequenceEntry {
  int segment_index = 0;
  std::string tag;
  int token_count = 0;
  MemoryBlock block;

  bool operator==(const SequenceEntry&) const = default;
};

// Global, temporally tagged token sequence handed to the downstream reader.
struct AssembledSequence {
  std::vector<SequenceEntry> entries;
  int total_tokens = 0;

  bool operator==(const AssembledSequence&) const = default;
};

// "<t=X.Ys>" where X.Y is the segment start time, index * window / fps,
// rendered with one decimal.
std::string timestamp_tag(int segment_index, const PipelineConfig& cfg);

// Inverse of timestamp_tag: the start time in seconds. Throws kParseError
// for anything that is not exactly "<t=" digits "." digit "s>".
double parse_timestamp_tag(std::string_view tag);

// Orders blocks by segment index (arrival order is irrelevant), checks that
// block i holds exactly budgets[i] rows and that the total fits cfg.b_max,
// and drops zero-token segments. Throws kPlanMismatch or kBudgetExceeded.
AssembledSequence assemble(std::vector<MemoryBlock> blocks,
                           std::span<const int> budgets,
                           const PipelineConfig& cfg);

AssembledSequence assemble(std::vector<MemoryBlock> blocks,
                           const AllocationPlan& plan,
                           const PipelineConfig& cfg);

}  // namespace tokenbudget
