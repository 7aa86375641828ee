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
#include <vector>

namespace tokenbudget {

// Ordered memory tokens of one segment, stored row-major. Row 0 is the
// earliest generated token. Each row carries the id of the latent atom it
// was generated from so the simulator can score retrieval.
class MemoryBlock {
 public:
  MemoryBlock() = default;
  MemoryBlock(int segment_index, int dim);
  // Throws kDimensionMismatch unless data.size() == atom_ids.size() * dim.
  MemoryBlock(int segment_index, int dim, std::vector<double> data,
              std::vector<int> atom_ids);

  int segment_index() const { return segment_index_; }
  int dim() const { return dim_; }
  int rows() const { return static_cast<int>(atom_ids_.size()); }
  bool empty() const { return atom_ids_.empty(); }

  std::span<const double> row(int i) const;
  std::span<const double> data() const { return data_; }
  std::span<const int> atom_ids() const { return atom_ids_; }

  void append_row(std::span<const double> values, int atom_id);

  // Bit-for-bit equality of contents and provenance.
  bool operator==(const MemoryBlock&) const = default;

 private:
  int segment_index_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
  std::vector<int> atom_ids_;
};

// First k rows. Throws kTruncationOutOfRange unless 1 <= k <= rows.
MemoryBlock head_truncate(const MemoryBlock& block, int k);

// Last k rows, in their original order. Same range contract.
MemoryBlock tail_truncate(const MemoryBlock& block, int k);

}  // namespace tokenbudget
