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

#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tokenbudget/allocation.h"
#include "tokenbudget/assembly.h"
#include "tokenbudget/episode.h"
#include "tokenbudget/memory_block.h"

namespace tokenbudget {

enum class PolicyKind {
  kAta,
  kUniform,
  kRandomDrop,
  kAdversarial,
  kTopK,
  kHardPruning,
  kAtaTailTruncate,
  kAtaMerge,
};

struct Policy {
  PolicyKind kind = PolicyKind::kAta;
  // random_drop only: fraction of segments discarded up front. Unset means
  // segments are kept until the budget is full.
  std::optional<double> drop_fraction;
};

std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);
// Every kind, in declaration order.
std::vector<Policy> policy_zoo();

// Per-segment token budgets chosen by `policy`. Routing kinds (random_drop,
// adversarial, top_k) keep whole segments at k_max; `rng` is consumed only
// by random_drop.
std::vector<int> policy_budgets(const Policy& policy, const ScoreVector& scores,
                                const AllocationConfig& cfg,
                                std::mt19937_64& rng);

// Reduces each full block to its policy budget (head, tail or merge
// depending on kind) and assembles the tagged sequence under cfg.b_max.
AssembledSequence apply_policy(const Policy& policy, const ScoreVector& scores,
                               std::span<const MemoryBlock> blocks,
                               const AllocationConfig& cfg,
                               const PipelineConfig& pipeline,
                               std::mt19937_64& rng);

// Oracle reader: decodes every retained row to its nearest vocabulary atom
// and answers with the decoded atom most similar to the query (ties to the
// lower id). Throws kNoEvidence for an empty sequence.
int read_answer(const AssembledSequence& seq, std::span<const double> query,
                const Vocabulary& vocabulary);

}  // namespace tokenbudget
