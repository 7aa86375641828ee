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

#include "tokenbudget/policy.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tokenbudget/compressor.h"
#include "tokenbudget/error.h"
#include "tokenbudget/vector_math.h"

namespace tokenbudget {
namespace {

constexpr PolicyKind kAllKinds[] = {
    PolicyKind::kAta,         PolicyKind::kUniform,
    PolicyKind::kRandomDrop,  PolicyKind::kAdversarial,
    PolicyKind::kTopK,        PolicyKind::kHardPruning,
    PolicyKind::kAtaTailTruncate, PolicyKind::kAtaMerge,
};

enum class Reduction { kHead, kTail, kMerge };

Reduction reduction_for(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kAtaTailTruncate:
      return Reduction::kTail;
    case PolicyKind::kAtaMerge:
      return Reduction::kMerge;
    default:
      return Reduction::kHead;
  }
}

// Keeps whole segments at k_max, visiting them in `order`, until the next
// one would overflow the budget or `limit` segments are kept.
std::vector<int> route(std::span<const std::size_t> order, std::size_t limit,
                       const AllocationConfig& cfg) {
  std::vector<int> budgets(order.size(), 0);
  long long used = 0;
  std::size_t kept = 0;
  for (std::size_t i : order) {
    if (kept == limit || used + cfg.k_max > cfg.b_max) break;
    budgets[i] = cfg.k_max;
    used += cfg.k_max;
    ++kept;
  }
  return budgets;
}

std::vector<std::size_t> by_score(const ScoreVector& scores, bool ascending) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? scores[a] < scores[b] : scores[a] > scores[b];
  });
  return order;
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kAta:
      return "ata";
    case PolicyKind::kUniform:
      return "uniform";
    case PolicyKind::kRandomDrop:
      return "random_drop";
    case PolicyKind::kAdversarial:
      return "adversarial";
    case PolicyKind::kTopK:
      return "top_k";
    case PolicyKind::kHardPruning:
      return "hard_pruning";
    case PolicyKind::kAtaTailTruncate:
      return "ata_tail_truncate";
    case PolicyKind::kAtaMerge:
      return "ata_merge";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (PolicyKind kind : kAllKinds) {
    if (policy_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<Policy> policy_zoo() {
  std::vector<Policy> out;
  for (PolicyKind kind : kAllKinds) out.push_back(Policy{kind, std::nullopt});
  return out;
}

std::vector<int> policy_budgets(const Policy& policy, const ScoreVector& scores,
                                const AllocationConfig& cfg,
                                std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t n = scores.size();
  switch (policy.kind) {
    case PolicyKind::kAta:
    case PolicyKind::kAtaTailTruncate:
    case PolicyKind::kAtaMerge:
      return allocate(scores, cfg).budgets;
    case PolicyKind::kHardPruning: {
      AllocationConfig pruning = cfg;
      pruning.k_min = 0;
      return allocate(scores, pruning).budgets;
    }
    case PolicyKind::kUniform: {
      const long long each =
          std::min<long long>(cfg.k_max, cfg.b_max / static_cast<long long>(n));
      return std::vector<int>(n, static_cast<int>(each));
    }
    case PolicyKind::kRandomDrop: {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
      std::size_t limit = n;
      if (policy.drop_fraction) {
        const double f = *policy.drop_fraction;
        if (!(f >= 0.0 && f <= 1.0)) {
          throw Error(ErrorCode::kInvalidConfig,
                      fmt::format("drop_fraction {} is outside [0, 1]", f));
        }
        limit = n - static_cast<std::size_t>(std::llround(f * n));
      }
      return route(order, limit, cfg);
    }
    case PolicyKind::kAdversarial:
      return route(by_score(scores, /*ascending=*/true), n, cfg);
    case PolicyKind::kTopK:
      return route(by_score(scores, /*ascending=*/false), n, cfg);
  }
  return {};
}

AssembledSequence apply_policy(const Policy& policy, const ScoreVector& scores,
                               std::span<const MemoryBlock> blocks,
                               const AllocationConfig& cfg,
                               const PipelineConfig& pipeline,
                               std::mt19937_64& rng) {
  if (blocks.size() != scores.size()) {
    throw Error(ErrorCode::kPlanMismatch,
                fmt::format("{} blocks for {} scores", blocks.size(),
                            scores.size()));
  }
  const std::vector<int> budgets = policy_budgets(policy, scores, cfg, rng);
  const Reduction reduction = reduction_for(policy.kind);

  std::vector<MemoryBlock> reduced;
  reduced.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const MemoryBlock& block = blocks[i];
    if (block.segment_index() < 0 ||
        static_cast<std::size_t>(block.segment_index()) >= budgets.size()) {
      throw Error(ErrorCode::kPlanMismatch,
                  fmt::format("block for unknown segment {}",
                              block.segment_index()));
    }
    const int k = budgets[block.segment_index()];
    if (k == 0) {
      reduced.emplace_back(block.segment_index(), block.dim());
      continue;
    }
    switch (reduction) {
      case Reduction::kHead:
        reduced.push_back(head_truncate(block, k));
        break;
      case Reduction::kTail:
        reduced.push_back(tail_truncate(block, k));
        break;
      case Reduction::kMerge:
        reduced.push_back(merge_reduce(block, k));
        break;
    }
  }
  PipelineConfig bounded = pipeline;
  bounded.b_max = cfg.b_max;
  return assemble(std::move(reduced), budgets, bounded);
}

int read_answer(const AssembledSequence& seq, std::span<const double> query,
                const Vocabulary& vocabulary) {
  if (seq.entries.empty()) {
    throw Error(ErrorCode::kNoEvidence, "assembled sequence is empty");
  }
  std::set<int> decoded;
  for (const SequenceEntry& entry : seq.entries) {
    for (int r = 0; r < entry.block.rows(); ++r) {
      decoded.insert(vocabulary.nearest(entry.block.row(r)));
    }
  }
  int answer = *decoded.begin();
  double best = -2.0;
  for (int id : decoded) {
    const double c = cosine(query, vocabulary.atom(id));
    if (c > best) {
      best = c;
      answer = id;
    }
  }
  return answer;
}

}  // namespace tokenbudget
