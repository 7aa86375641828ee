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

#include "tokenbudget/assembly.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>

#include "tokenbudget/error.h"

namespace tokenbudget {

void PipelineConfig::validate() const {
  if (!(fps > 0.0) || window < 1 || f_max < window || b_max < 0) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("need fps > 0, window >= 1, f_max >= window, "
                            "budget >= 0; got fps={} window={} f_max={} "
                            "budget={}",
                            fps, window, f_max, b_max));
  }
}

std::string timestamp_tag(int segment_index, const PipelineConfig& cfg) {
  if (segment_index < 0) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("negative segment index {}", segment_index));
  }
  const double seconds =
      static_cast<double>(segment_index) * cfg.window / cfg.fps;
  return fmt::format("<t={:.1f}s>", seconds);
}

double parse_timestamp_tag(std::string_view tag) {
  auto fail = [&](std::size_t at) -> double {
    throw Error(ErrorCode::kParseError,
                fmt::format("malformed timestamp tag '{}'", tag), at);
  };
  constexpr std::string_view kOpen = "<t=";
  constexpr std::string_view kClose = "s>";
  if (!tag.starts_with(kOpen)) return fail(0);
  std::size_t pos = kOpen.size();
  const std::size_t int_begin = pos;
  while (pos < tag.size() && std::isdigit(static_cast<unsigned char>(tag[pos])))
    ++pos;
  if (pos == int_begin) return fail(pos);
  if (pos >= tag.size() || tag[pos] != '.') return fail(pos);
  ++pos;
  if (pos >= tag.size() || !std::isdigit(static_cast<unsigned char>(tag[pos])))
    return fail(pos);
  ++pos;
  if (tag.substr(pos) != kClose) return fail(pos);

  double seconds = 0.0;
  const char* first = tag.data() + int_begin;
  const char* last = tag.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, last, seconds);
  if (ec != std::errc() || ptr != last) return fail(int_begin);
  return seconds;
}

AssembledSequence assemble(std::vector<MemoryBlock> blocks,
                           std::span<const int> budgets,
                           const PipelineConfig& cfg) {
  if (blocks.size() != budgets.size()) {
    throw Error(ErrorCode::kPlanMismatch,
                fmt::format("{} blocks for a plan of {} segments",
                            blocks.size(), budgets.size()));
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const MemoryBlock& a, const MemoryBlock& b) {
              return a.segment_index() < b.segment_index();
            });

  std::int64_t total = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const MemoryBlock& block = blocks[i];
    if (block.segment_index() != static_cast<int>(i)) {
      throw Error(ErrorCode::kPlanMismatch,
                  fmt::format("expected segment {} but found segment {}", i,
                              block.segment_index()));
    }
    if (budgets[i] < 0 || block.rows() != budgets[i]) {
      throw Error(ErrorCode::kPlanMismatch,
                  fmt::format("segment {} has {} rows but was allotted {}", i,
                              block.rows(), budgets[i]));
    }
    total += budgets[i];
  }
  if (total > cfg.b_max) {
    throw Error(ErrorCode::kBudgetExceeded,
                fmt::format("{} tokens exceed the budget of {}", total,
                            cfg.b_max));
  }

  AssembledSequence seq;
  seq.total_tokens = static_cast<int>(total);
  for (MemoryBlock& block : blocks) {
    if (block.empty()) continue;
    SequenceEntry entry;
    entry.segment_index = block.segment_index();
    entry.tag = timestamp_tag(block.segment_index(), cfg);
    entry.token_count = block.rows();
    entry.block = std::move(block);
    seq.entries.push_back(std::move(entry));
  }
  return seq;
}

AssembledSequence assemble(std::vector<MemoryBlock> blocks,
                           const AllocationPlan& plan,
                           const PipelineConfig& cfg) {
  return assemble(std::move(blocks), std::span<const int>(plan.budgets), cfg);
}

}  // namespace tokenbudget
