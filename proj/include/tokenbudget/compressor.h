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

#include <cstdint>
#include <span>

#include "tokenbudget/memory_block.h"
#include "tokenbudget/segment.h"

namespace tokenbudget {

struct CompressorSpec {
  int k_max = 128;
  int dim = 32;
  // Expected L2 norm of the Gaussian perturbation added to each row; the
  // per-component deviation is token_noise_sigma / sqrt(dim).
  double token_noise_sigma = 0.0;
  // Rank-ordered placement of atoms (most query-similar first). When off,
  // rows are emitted in a seeded random order.
  bool frontload = true;
  std::uint64_t seed = 0;

  void validate() const;
};

// Simulated local compressor. Atoms are ranked by descending cosine to the
// query; row j < A copies the rank-j atom, rows j >= A cycle through the
// lower half of the ranking. Always emits exactly k_max rows.
MemoryBlock compress_segment(const CompressorSpec& spec,
                             std::span<const double> query,
                             const SegmentContent& content);

// Token-merging baseline: k contiguous, near-equal groups of rows, each
// replaced by its mean. The merged row keeps the atom id of the group
// member closest to the mean. Throws kTruncationOutOfRange unless
// 1 <= k <= rows.
MemoryBlock merge_reduce(const MemoryBlock& block, int k);

}  // namespace tokenbudget
