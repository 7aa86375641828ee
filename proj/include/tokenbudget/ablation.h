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
#include <string>
#include <utility>
#include <vector>

#include "tokenbudget/allocation.h"
#include "tokenbudget/assembly.h"
#include "tokenbudget/episode.h"
#include "tokenbudget/policy.h"
#include "tokenbudget/relevance.h"

namespace tokenbudget {

// Everything one ablation run needs. episode.seed is the master seed; every
// trial derives its own episode, scorer, compressor and policy streams from
// it, so trials can run in any order.
struct AblationConfig {
  EpisodeSpec episode;
  ScorerSpec scorer;
  AllocationConfig allocation{.k_min = 4, .k_max = 64, .b_max = 512};
  PipelineConfig pipeline{.fps = 2.0, .window = 8, .f_max = 256, .b_max = 512};
  double token_noise_sigma = 0.05;
  bool frontload = true;
  std::vector<Policy> policies = policy_zoo();
  int trials = 500;

  void validate() const;
};

struct PolicyResult {
  std::string policy;
  int trials = 0;
  int correct = 0;
  double accuracy = 0.0;
  double mean_tokens = 0.0;
  // Trials in which every segment kept at least one token.
  int full_coverage_trials = 0;
  double mean_segments_present = 0.0;
  int no_evidence = 0;

  bool operator==(const PolicyResult&) const = default;
};

// Fixed-width bins over [0, k_max]; the last bin is closed on the right.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::int64_t> counts;

  bool operator==(const Histogram&) const = default;
};

struct EpisodeUtilization {
  int episode = 0;
  int segments = 0;
  int frames = 0;
  int tokens = 0;
  int capacity = 0;
  AllocationStage stage = AllocationStage::kIdealAdopted;

  bool operator==(const EpisodeUtilization&) const = default;
};

struct RunReport {
  std::vector<PolicyResult> policies;
  // Allocation statistics describe the ATA plan of every trial, whatever
  // policies were evaluated.
  Histogram histogram;
  std::vector<EpisodeUtilization> utilization;
  int trials = 0;
  std::int64_t segments_scored = 0;
  double residual_stage_fraction = 0.0;
  // Mean over episodes of (tokens / frames).
  double mean_tokens_per_frame = 0.0;
  // Pooled tokens over pooled frames.
  double pooled_tokens_per_frame = 0.0;
  double tokens_per_frame_bound = 0.0;
  double avg_capacity_per_segment = 0.0;
  double min_tokens_per_frame = 0.0;
  double max_tokens_per_frame = 0.0;

  bool operator==(const RunReport&) const = default;
};

// Outcome of a single trial, before aggregation.
struct TrialOutcome {
  std::vector<int> ata_budgets;
  AllocationStage ata_stage = AllocationStage::kIdealAdopted;
  std::vector<bool> correct;
  std::vector<bool> no_evidence;
  std::vector<int> tokens;
  std::vector<int> segments_present;
};

TrialOutcome evaluate_trial(const AblationConfig& cfg, int trial);

// OpenMP over trials. Aggregation happens serially in trial order, so the
// report is identical to run_ablation_reference for any thread count.
RunReport run_ablation(const AblationConfig& cfg);

// Single-threaded reference kept for testing and benchmarking.
RunReport run_ablation_reference(const AblationConfig& cfg);

RunReport aggregate(const AblationConfig& cfg,
                    std::span<const TrialOutcome> outcomes);

Histogram make_histogram(int k_max);
void add_to_histogram(Histogram& hist, int tokens);

// Theoretical ceiling on average tokens per frame: b_max / f_max. Throws
// kDivisionByZero when f_max == 0.
double tokens_per_frame_bound(std::int64_t b_max, std::int64_t f_max);

// (n_samples * budget) / sum(segment_counts). Throws kDivisionByZero when
// the segment total is zero.
double dataset_avg_capacity(std::int64_t n_samples, std::int64_t budget,
                            std::span<const int> segment_counts);

// Smallest and largest per-frame rate a single segment can receive:
// k_min / window and k_max / window.
std::pair<double, double> per_frame_range(const AllocationConfig& cfg,
                                          int window);

}  // namespace tokenbudget
