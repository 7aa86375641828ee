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

#include "tokenbudget/compressor.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "tokenbudget/error.h"
#include "tokenbudget/seeding.h"
#include "tokenbudget/vector_math.h"

namespace tokenbudget {
namespace {

int rank_for_row(int row, int atom_count) {
  if (row < atom_count) return row;
  const int low = atom_count / 2;
  return low + (row - atom_count) % (atom_count - low);
}

}  // namespace

void CompressorSpec::validate() const {
  if (k_max < 1 || dim < 2 || !(token_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("compressor needs k_max >= 1, dim >= 2, noise >= "
                            "0; got k_max={} dim={} noise={}",
                            k_max, dim, token_noise_sigma));
  }
}

MemoryBlock compress_segment(const CompressorSpec& spec,
                             std::span<const double> query,
                             const SegmentContent& content) {
  spec.validate();
  if (query.size() != static_cast<std::size_t>(spec.dim)) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("query dim {} != compressor dim {}", query.size(),
                            spec.dim));
  }
  if (content.atoms.empty()) {
    throw Error(ErrorCode::kEmptySegment,
                fmt::format("segment {} has no atoms", content.segment_index));
  }
  const int atom_count = static_cast<int>(content.atoms.size());
  std::vector<double> similarity(atom_count);
  for (int a = 0; a < atom_count; ++a) {
    const Atom& atom = content.atoms[a];
    if (atom.vec.size() != query.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("atom {} has dim {}, expected {}", atom.id,
                              atom.vec.size(), spec.dim));
    }
    similarity[a] = cosine(query, atom.vec);
  }
  std::vector<int> ranked(atom_count);
  std::iota(ranked.begin(), ranked.end(), 0);
  std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) {
    return similarity[a] > similarity[b];
  });

  std::mt19937_64 rng(derive_seed(
      spec.seed, {static_cast<std::uint64_t>(content.segment_index)}));
  std::normal_distribution<double> noise(
      0.0, spec.token_noise_sigma / std::sqrt(static_cast<double>(spec.dim)));

  std::vector<int> row_order(spec.k_max);
  std::iota(row_order.begin(), row_order.end(), 0);
  if (!spec.frontload) std::shuffle(row_order.begin(), row_order.end(), rng);

  MemoryBlock block(content.segment_index, spec.dim);
  std::vector<double> row(spec.dim);
  for (int slot : row_order) {
    const Atom& atom = content.atoms[ranked[rank_for_row(slot, atom_count)]];
    for (int c = 0; c < spec.dim; ++c) {
      row[c] = atom.vec[c];
      if (spec.token_noise_sigma > 0.0) row[c] += noise(rng);
    }
    block.append_row(row, atom.id);
  }
  return block;
}

MemoryBlock merge_reduce(const MemoryBlock& block, int k) {
  const int n = block.rows();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kTruncationOutOfRange,
                fmt::format("cannot merge {} rows into {} groups", n, k));
  }
  const int dim = block.dim();
  MemoryBlock out(block.segment_index(), dim);
  std::vector<double> mean(dim);
  for (int g = 0; g < k; ++g) {
    const int begin = static_cast<int>(static_cast<long long>(g) * n / k);
    const int end = static_cast<int>(static_cast<long long>(g + 1) * n / k);
    std::fill(mean.begin(), mean.end(), 0.0);
    for (int r = begin; r < end; ++r) {
      const auto values = block.row(r);
      for (int c = 0; c < dim; ++c) mean[c] += values[c];
    }
    for (double& m : mean) m /= (end - begin);

    int nearest = begin;
    double best = std::numeric_limits<double>::infinity();
    for (int r = begin; r < end; ++r) {
      const auto values = block.row(r);
      double dist = 0.0;
      for (int c = 0; c < dim; ++c) {
        dist += (values[c] - mean[c]) * (values[c] - mean[c]);
      }
      if (dist < best) {
        best = dist;
        nearest = r;
      }
    }
    out.append_row(mean, block.atom_ids()[nearest]);
  }
  return out;
}

}  // namespace tokenbudget
