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

#include "tokenbudget/ablation.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <tuple>

#include "tokenbudget/compressor.h"
#include "tokenbudget/error.h"
#include "tokenbudget/seeding.h"

namespace tokenbudget {
namespace {

constexpr int kHistogramBins = 16;

enum Stream : std::uint64_t {
  kEpisodeStream = 0,
  kScorerStream = 1,
  kCompressorStream = 2,
  kPolicyStream = 3,
};

}  // namespace

void AblationConfig::validate() const {
  episode.validate();
  scorer.validate();
  allocation.validate();
  pipeline.validate();
  if (trials < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("trials must be >= 1, got {}", trials));
  }
  if (!(token_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "token_noise_sigma must be >= 0");
  }
}

TrialOutcome evaluate_trial(const AblationConfig& cfg, int trial) {
  const std::uint64_t master = cfg.episode.seed;
  const auto t = static_cast<std::uint64_t>(trial);

  EpisodeSpec episode_spec = cfg.episode;
  episode_spec.seed = derive_seed(master, {t, kEpisodeStream});
  const Episode episode = generate_episode(episode_spec);

  ScorerSpec scorer = cfg.scorer;
  scorer.kind = ScorerKind::kOracle;
  scorer.seed = derive_seed(master, {t, kScorerStream});
  const ScoreVector scores =
      score_episode(scorer, episode.query, episode.segments);

  CompressorSpec compressor{.k_max = cfg.allocation.k_max,
                            .dim = cfg.episode.embed_dim,
                            .token_noise_sigma = cfg.token_noise_sigma,
                            .frontload = cfg.frontload,
                            .seed = derive_seed(master, {t, kCompressorStream})};
  std::vector<MemoryBlock> blocks;
  blocks.reserve(episode.segments.size());
  for (const SegmentContent& seg : episode.segments) {
    blocks.push_back(compress_segment(compressor, episode.query, seg));
  }

  TrialOutcome out;
  const AllocationPlan plan = allocate(scores, cfg.allocation);
  out.ata_budgets = plan.budgets;
  out.ata_stage = plan.stage;

  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    std::mt19937_64 rng(derive_seed(master, {t, kPolicyStream, p}));
    const AssembledSequence seq = apply_policy(
        cfg.policies[p], scores, blocks, cfg.allocation, cfg.pipeline, rng);
    bool correct = false;
    bool empty = false;
    try {
      correct = read_answer(seq, episode.query, episode.vocabulary) ==
                episode.needle_id;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoEvidence) throw;
      empty = true;
    }
    out.correct.push_back(correct);
    out.no_evidence.push_back(empty);
    out.tokens.push_back(seq.total_tokens);
    out.segments_present.push_back(static_cast<int>(seq.entries.size()));
  }
  return out;
}

RunReport run_ablation(const AblationConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutcome> outcomes(cfg.trials);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < cfg.trials; ++t) {
    try {
      outcomes[t] = evaluate_trial(cfg, t);
    } catch (...) {
#pragma omp critical(tokenbudget_ablation_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(cfg, outcomes);
}

RunReport run_ablation_reference(const AblationConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t) {
    outcomes.push_back(evaluate_trial(cfg, t));
  }
  return aggregate(cfg, outcomes);
}

RunReport aggregate(const AblationConfig& cfg,
                    std::span<const TrialOutcome> outcomes) {
  RunReport report;
  report.trials = static_cast<int>(outcomes.size());
  report.histogram = make_histogram(cfg.allocation.k_max);

  const std::size_t n_policies = cfg.policies.size();
  std::vector<std::int64_t> tokens(n_policies, 0);
  std::vector<std::int64_t> present(n_policies, 0);
  report.policies.resize(n_policies);
  for (std::size_t p = 0; p < n_policies; ++p) {
    report.policies[p].policy = std::string(policy_name(cfg.policies[p].kind));
    report.policies[p].trials = report.trials;
  }

  std::int64_t pooled_tokens = 0;
  std::int64_t pooled_frames = 0;
  double per_episode_rate_sum = 0.0;
  int residual_trials = 0;
  std::vector<int> segment_counts;
  segment_counts.reserve(outcomes.size());

  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const TrialOutcome& o = outcomes[t];
    const int n = static_cast<int>(o.ata_budgets.size());
    for (std::size_t p = 0; p < n_policies; ++p) {
      PolicyResult& r = report.policies[p];
      r.correct += o.correct[p] ? 1 : 0;
      r.no_evidence += o.no_evidence[p] ? 1 : 0;
      r.full_coverage_trials += o.segments_present[p] == n ? 1 : 0;
      tokens[p] += o.tokens[p];
      present[p] += o.segments_present[p];
    }
    for (int k : o.ata_budgets) add_to_histogram(report.histogram, k);

    EpisodeUtilization u;
    u.episode = static_cast<int>(t);
    u.segments = n;
    u.frames = n * cfg.pipeline.window;
    u.tokens = std::accumulate(o.ata_budgets.begin(), o.ata_budgets.end(), 0);
    u.capacity = cfg.allocation.b_max;
    u.stage = o.ata_stage;
    report.utilization.push_back(u);

    pooled_tokens += u.tokens;
    pooled_frames += u.frames;
    per_episode_rate_sum += static_cast<double>(u.tokens) / u.frames;
    residual_trials += o.ata_stage == AllocationStage::kResidualDistributed;
    segment_counts.push_back(n);
    report.segments_scored += n;
  }

  if (report.trials > 0) {
    const double trials = report.trials;
    for (std::size_t p = 0; p < n_policies; ++p) {
      PolicyResult& r = report.policies[p];
      r.accuracy = r.correct / trials;
      r.mean_tokens = static_cast<double>(tokens[p]) / trials;
      r.mean_segments_present = static_cast<double>(present[p]) / trials;
    }
    report.residual_stage_fraction = residual_trials / trials;
    report.mean_tokens_per_frame = per_episode_rate_sum / trials;
    report.pooled_tokens_per_frame =
        static_cast<double>(pooled_tokens) / pooled_frames;
    report.avg_capacity_per_segment = dataset_avg_capacity(
        report.trials, cfg.allocation.b_max, segment_counts);
  }
  report.tokens_per_frame_bound =
      tokens_per_frame_bound(cfg.allocation.b_max, cfg.pipeline.f_max);
  std::tie(report.min_tokens_per_frame, report.max_tokens_per_frame) =
      per_frame_range(cfg.allocation, cfg.pipeline.window);
  return report;
}

Histogram make_histogram(int k_max) {
  Histogram h;
  const double width = static_cast<double>(k_max) / kHistogramBins;
  for (int b = 0; b <= kHistogramBins; ++b) h.edges.push_back(b * width);
  h.counts.assign(kHistogramBins, 0);
  return h;
}

void add_to_histogram(Histogram& hist, int tokens) {
  if (hist.counts.empty()) return;
  const double width = hist.edges[1] - hist.edges[0];
  const auto last = static_cast<long long>(hist.counts.size()) - 1;
  const auto bin = std::clamp<long long>(
      static_cast<long long>(std::floor(tokens / width)), 0, last);
  ++hist.counts[bin];
}

double tokens_per_frame_bound(std::int64_t b_max, std::int64_t f_max) {
  if (f_max == 0) {
    throw Error(ErrorCode::kDivisionByZero, "f_max must be non-zero");
  }
  if (f_max < 0 || b_max < 0) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("budget {} and f_max {} must be non-negative",
                            b_max, f_max));
  }
  return static_cast<double>(b_max) / static_cast<double>(f_max);
}

double dataset_avg_capacity(std::int64_t n_samples, std::int64_t budget,
                            std::span<const int> segment_counts) {
  const std::int64_t total = std::accumulate(
      segment_counts.begin(), segment_counts.end(), std::int64_t{0});
  if (total == 0) {
    throw Error(ErrorCode::kDivisionByZero, "no segments to average over");
  }
  return static_cast<double>(n_samples) * static_cast<double>(budget) /
         static_cast<double>(total);
}

std::pair<double, double> per_frame_range(const AllocationConfig& cfg,
                                          int window) {
  if (window < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("window must be >= 1, got {}", window));
  }
  return {static_cast<double>(cfg.k_min) / window,
          static_cast<double>(cfg.k_max) / window};
}

}  // namespace tokenbudget
