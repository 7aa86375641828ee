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

#include "tokenbudget/memory_block.h"

#include <fmt/format.h>

#include "tokenbudget/error.h"

namespace tokenbudget {
namespace {

void check_range(const MemoryBlock& block, int k) {
  if (k < 1 || k > block.rows()) {
    throw Error(ErrorCode::kTruncationOutOfRange,
                fmt::format("cannot keep {} of {} rows in segment {}", k,
                            block.rows(), block.segment_index()));
  }
}

MemoryBlock slice(const MemoryBlock& block, int first, int count) {
  const auto dim = static_cast<std::size_t>(block.dim());
  const auto data = block.data().subspan(first * dim, count * dim);
  const auto ids = block.atom_ids().subspan(first, count);
  return MemoryBlock(block.segment_index(), block.dim(),
                     std::vector<double>(data.begin(), data.end()),
                     std::vector<int>(ids.begin(), ids.end()));
}

}  // namespace

MemoryBlock::MemoryBlock(int segment_index, int dim)
    : segment_index_(segment_index), dim_(dim) {
  if (dim < 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("memory dimension must be positive, got {}", dim));
  }
}

MemoryBlock::MemoryBlock(int segment_index, int dim, std::vector<double> data,
                         std::vector<int> atom_ids)
    : MemoryBlock(segment_index, dim) {
  if (data.size() != atom_ids.size() * static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} values do not form {} rows of width {}",
                            data.size(), atom_ids.size(), dim));
  }
  data_ = std::move(data);
  atom_ids_ = std::move(atom_ids);
}

std::span<const double> MemoryBlock::row(int i) const {
  return std::span<const double>(data_).subspan(
      static_cast<std::size_t>(i) * dim_, dim_);
}

void MemoryBlock::append_row(std::span<const double> values, int atom_id) {
  if (values.size() != static_cast<std::size_t>(dim_)) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("row of width {} does not fit a block of width {}",
                            values.size(), dim_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  atom_ids_.push_back(atom_id);
}

MemoryBlock head_truncate(const MemoryBlock& block, int k) {
  check_range(block, k);
  return slice(block, 0, k);
}

MemoryBlock tail_truncate(const MemoryBlock& block, int k) {
  check_range(block, k);
  return slice(block, block.rows() - k, k);
}

}  // namespace tokenbudget
