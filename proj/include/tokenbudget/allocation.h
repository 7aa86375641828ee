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
#include <span>
#include <string_view>
#include <vector>

namespace tokenbudget {

struct AllocationConfig {
  int k_min = 4;
  int k_max = 128;
  int b_max = 4096;
  double epsilon = 1e-6;
  // Equal scores get min(k_max, b_max / N) each instead of k_min.
  bool uniform_fallback = false;

  // Throws kInvalidConfig unless 0 <= k_min <= k_max, k_max >= 1,
  // b_max >= 0 and epsilon > 0.
  void validate() const;
};

// Per-segment relevance probabilities, each strictly inside (0, 1).
class ScoreVector {
 public:
  // Throws kEmptyScores for an empty input and kInvalidScore for any value
  // outside the open unit interval (NaN included).
  explicit ScoreVector(std::vector<double> scores);

  std::span<const double> values() const { return scores_; }
  std::size_t size() const { return scores_.size(); }
  double operator[](std::size_t i) const { return scores_[i]; }

 private:
  std::vector<double> scores_;
};

struct NormalizedScores {
  std::vector<double> values;
  // Raw max - min of the input.
  double spread = 0.0;
};

enum class AllocationStage {
  kIdealAdopted,
  kResidualDistributed,
  kUniformFallback,
};

std::string_view stage_name(AllocationStage stage);
std::optional<AllocationStage> parse_stage(std::string_view name);

struct AllocationPlan {
  std::vector<int> budgets;
  AllocationStage stage = AllocationStage::kIdealAdopted;
  int b_base = 0;
  int b_res = 0;
  int total = 0;

  bool operator==(const AllocationPlan&) const = default;
};

// Floors of the proportional residual shares (already clamped to k_max) and
// the fractional parts left over by flooring.
struct ResidualShares {
  std::vector<int> floors;
  std::vector<double> remainders;
};

// Min-max scaling. When the spread is at most epsilon every value is zero.
NormalizedScores normalize_scores(std::span<const double> scores,
                                  double epsilon);

// k_min + floor((k_max - k_min) * s) per segment.
std::vector<int> ideal_allocation(const NormalizedScores& norm,
                                  const AllocationConfig& cfg);

// Splits b_max - N * k_min across segments in proportion to the normalized
// scores. Throws kBudgetInfeasible when b_max < N * k_min.
ResidualShares residual_allocation(const NormalizedScores& norm,
                                   const AllocationConfig& cfg);

// Largest-remainder top-up. Hands b_max - sum(floors) tokens out one at a
// time in descending remainder order (ties: higher normalized score, then
// lower index), skipping segments at k_max, cycling until the leftover is
// spent or every segment is capped.
std::vector<int> distribute_remainders(std::span<const int> floors,
                                       std::span<const double> remainders,
                                       const NormalizedScores& norm,
                                       const AllocationConfig& cfg);

// Two-stage budgeted allocation. The ideal linear allocation is adopted
// verbatim when it fits under b_max; otherwise the residual budget is
// apportioned and discretized with distribute_remainders.
AllocationPlan allocate(const ScoreVector& scores, const AllocationConfig& cfg);

}  // namespace tokenbudget
