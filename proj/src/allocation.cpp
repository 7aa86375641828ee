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

#include "tokenbudget/allocation.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "tokenbudget/error.h"

namespace tokenbudget {
namespace {

std::int64_t base_budget(std::size_t n, const AllocationConfig& cfg) {
  return static_cast<std::int64_t>(n) * cfg.k_min;
}

void require_feasible(std::size_t n, const AllocationConfig& cfg) {
  if (cfg.b_max < base_budget(n, cfg)) {
    throw Error(ErrorCode::kBudgetInfeasible,
                fmt::format("budget {} cannot hold {} anchors of {} tokens",
                            cfg.b_max, n, cfg.k_min));
  }
}

}  // namespace

void AllocationConfig::validate() const {
  if (k_min < 0 || k_max < 1 || k_min > k_max) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("need 0 <= k_min <= k_max and k_max >= 1, got "
                            "k_min={} k_max={}",
                            k_min, k_max));
  }
  if (b_max < 0) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("budget must be non-negative, got {}", b_max));
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("epsilon must be positive, got {}", epsilon));
  }
}

ScoreVector::ScoreVector(std::vector<double> scores)
    : scores_(std::move(scores)) {
  if (scores_.empty()) {
    throw Error(ErrorCode::kEmptyScores, "score vector is empty");
  }
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    const double s = scores_[i];
    if (!(s > 0.0 && s < 1.0)) {
      throw Error(ErrorCode::kInvalidScore,
                  fmt::format("score {} at index {} is outside (0, 1)", s, i));
    }
  }
}

std::string_view stage_name(AllocationStage stage) {
  switch (stage) {
    case AllocationStage::kIdealAdopted:
      return "ideal-adopted";
    case AllocationStage::kResidualDistributed:
      return "residual-distributed";
    case AllocationStage::kUniformFallback:
      return "uniform-fallback";
  }
  return "unknown";
}

std::optional<AllocationStage> parse_stage(std::string_view name) {
  for (auto stage :
       {AllocationStage::kIdealAdopted, AllocationStage::kResidualDistributed,
        AllocationStage::kUniformFallback}) {
    if (stage_name(stage) == name) return stage;
  }
  return std::nullopt;
}

NormalizedScores normalize_scores(std::span<const double> scores,
                                  double epsilon) {
  if (scores.empty()) {
    throw Error(ErrorCode::kEmptyScores, "cannot normalize an empty score list");
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  NormalizedScores out;
  out.spread = *hi - *lo;
  out.values.assign(scores.size(), 0.0);
  if (out.spread > epsilon) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      out.values[i] = (scores[i] - *lo) / out.spread;
    }
  }
  return out;
}

std::vector<int> ideal_allocation(const NormalizedScores& norm,
                                  const AllocationConfig& cfg) {
  cfg.validate();
  const int range = cfg.k_max - cfg.k_min;
  std::vector<int> out;
  out.reserve(norm.values.size());
  for (double s : norm.values) {
    const int extra = static_cast<int>(std::floor(range * s));
    out.push_back(std::clamp(cfg.k_min + extra, cfg.k_min, cfg.k_max));
  }
  return out;
}

ResidualShares residual_allocation(const NormalizedScores& norm,
                                   const AllocationConfig& cfg) {
  cfg.validate();
  require_feasible(norm.values.size(), cfg);
  const double residual =
      static_cast<double>(cfg.b_max - base_budget(norm.values.size(), cfg));
  const double denom =
      std::accumulate(norm.values.begin(), norm.values.end(), 0.0) +
      cfg.epsilon;

  ResidualShares out;
  out.floors.reserve(norm.values.size());
  out.remainders.reserve(norm.values.size());
  for (double s : norm.values) {
    const double share = residual * s / denom;
    const double whole = std::floor(share);
    const double k = std::min<double>(cfg.k_min + whole, cfg.k_max);
    out.floors.push_back(static_cast<int>(k));
    out.remainders.push_back(share - whole);
  }
  return out;
}

std::vector<int> distribute_remainders(std::span<const int> floors,
                                       std::span<const double> remainders,
                                       const NormalizedScores& norm,
                                       const AllocationConfig& cfg) {
  const std::size_t n = floors.size();
  if (remainders.size() != n || norm.values.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "floors, remainders and scores must have equal length");
  }
  std::vector<int> out(floors.begin(), floors.end());
  const std::int64_t assigned =
      std::accumulate(out.begin(), out.end(), std::int64_t{0});
  std::int64_t leftover = cfg.b_max - assigned;
  if (leftover <= 0) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    if (norm.values[a] != norm.values[b]) {
      return norm.values[a] > norm.values[b];
    }
    return a < b;
  });

  while (leftover > 0) {
    bool granted = false;
    for (std::size_t i : order) {
      if (out[i] >= cfg.k_max) continue;
      ++out[i];
      granted = true;
      if (--leftover == 0) break;
    }
    if (!granted) break;
  }
  return out;
}

AllocationPlan allocate(const ScoreVector& scores,
                        const AllocationConfig& cfg) {
  cfg.validate();
  const std::size_t n = scores.size();
  require_feasible(n, cfg);

  AllocationPlan plan;
  plan.b_base = static_cast<int>(base_budget(n, cfg));
  plan.b_res = cfg.b_max - plan.b_base;

  const NormalizedScores norm = normalize_scores(scores.values(), cfg.epsilon);

  if (cfg.uniform_fallback && norm.spread <= cfg.epsilon) {
    const int each = static_cast<int>(
        std::min<std::int64_t>(cfg.k_max, cfg.b_max / static_cast<int>(n)));
    plan.budgets.assign(n, each);
    plan.stage = AllocationStage::kUniformFallback;
  } else {
    std::vector<int> ideal = ideal_allocation(norm, cfg);
    const std::int64_t ideal_total =
        std::accumulate(ideal.begin(), ideal.end(), std::int64_t{0});
    if (ideal_total <= cfg.b_max) {
      plan.budgets = std::move(ideal);
      plan.stage = AllocationStage::kIdealAdopted;
    } else {
      const ResidualShares shares = residual_allocation(norm, cfg);
      plan.budgets = distribute_remainders(shares.floors, shares.remainders,
                                           norm, cfg);
      plan.stage = AllocationStage::kResidualDistributed;
    }
  }
  plan.total = std::accumulate(plan.budgets.begin(), plan.budgets.end(), 0);
  return plan;
}

}  // namespace tokenbudget
