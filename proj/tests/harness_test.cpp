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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "tokenbudget/ablation.h"
#include "tokenbudget/compressor.h"
#include "tokenbudget/episode.h"
#include "tokenbudget/error.h"
#include "tokenbudget/policy.h"
#include "tokenbudget/vector_math.h"

namespace tokenbudget {
namespace {

const PolicyResult& result_for(const RunReport& r, std::string_view name) {
  for (const PolicyResult& p : r.policies) {
    if (p.policy == name) return p;
  }
  throw std::out_of_range(std::string(name));
}

std::vector<MemoryBlock> full_blocks(const Episode& ep, int k_max,
                                     double noise = 0.0) {
  const CompressorSpec spec{.k_max = k_max,
                            .dim = ep.vocabulary.dim(),
                            .token_noise_sigma = noise};
  std::vector<MemoryBlock> out;
  for (const SegmentContent& seg : ep.segments) {
    out.push_back(compress_segment(spec, ep.query, seg));
  }
  return out;
}

TEST(EpisodeTest, NoiseFreeQueryIsTheNeedle) {
  const Episode ep = generate_episode(EpisodeSpec{.seed = 3});
  EXPECT_NEAR(cosine(ep.query, ep.vocabulary.atom(ep.needle_id)), 1.0, 1e-12);
  ASSERT_EQ(ep.needle_segments.size(), 1u);
  int occurrences = 0;
  for (const SegmentContent& seg : ep.segments) {
    EXPECT_EQ(static_cast<int>(seg.atoms.size()), 8);
    for (const Atom& a : seg.atoms) {
      if (a.id == ep.needle_id) {
        ++occurrences;
        EXPECT_EQ(seg.segment_index, ep.needle_segments[0]);
      }
    }
  }
  EXPECT_EQ(occurrences, 1);
}

TEST(EpisodeTest, SingleSegmentHoldsTheNeedle) {
  const Episode ep = generate_episode(EpisodeSpec{.n_segments = 1, .seed = 9});
  ASSERT_EQ(ep.segments.size(), 1u);
  EXPECT_EQ(ep.needle_segments, std::vector<int>{0});
}

TEST(EpisodeTest, NeedleCountIsCappedBySegments) {
  const Episode ep =
      generate_episode(EpisodeSpec{.n_segments = 4, .needle_count = 9});
  std::vector<int> segs = ep.needle_segments;
  std::sort(segs.begin(), segs.end());
  EXPECT_EQ(segs, (std::vector<int>{0, 1, 2, 3}));
}

TEST(EpisodeTest, DeterministicInSeed) {
  const EpisodeSpec spec{.query_noise_sigma = 0.2, .seed = 77};
  const Episode a = generate_episode(spec);
  const Episode b = generate_episode(spec);
  EXPECT_EQ(a.query, b.query);
  EXPECT_EQ(a.needle_id, b.needle_id);
  EXPECT_EQ(a.needle_segments, b.needle_segments);
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    for (std::size_t j = 0; j < a.segments[i].atoms.size(); ++j) {
      EXPECT_EQ(a.segments[i].atoms[j].id, b.segments[i].atoms[j].id);
    }
  }
  const Episode c = generate_episode(EpisodeSpec{.query_noise_sigma = 0.2,
                                                 .seed = 78});
  EXPECT_NE(a.query, c.query);
}

TEST(EpisodeTest, InvalidSpecs) {
  EXPECT_THROW(generate_episode(EpisodeSpec{.n_segments = 0}), Error);
  EXPECT_THROW(generate_episode(EpisodeSpec{.atoms_per_segment = 0}), Error);
  EXPECT_THROW(generate_episode(EpisodeSpec{.vocab_size = 1}), Error);
  EXPECT_THROW(generate_episode(EpisodeSpec{.query_noise_sigma = -1.0}), Error);
}

TEST(PolicyTest, Names) {
  for (const Policy& p : policy_zoo()) {
    EXPECT_EQ(parse_policy_kind(policy_name(p.kind)), p.kind);
  }
  EXPECT_EQ(policy_zoo().size(), 8u);
  EXPECT_FALSE(parse_policy_kind("oracle").has_value());
}

TEST(PolicyTest, UniformSplitsEvenly) {
  std::mt19937_64 rng(1);
  const ScoreVector s(std::vector<double>(8, 0.5));
  const AllocationConfig cfg{.k_min = 4, .k_max = 128, .b_max = 512};
  EXPECT_EQ(policy_budgets(Policy{PolicyKind::kUniform}, s, cfg, rng),
            std::vector<int>(8, 64));
  const AllocationConfig roomy{.k_min = 4, .k_max = 16, .b_max = 4096};
  EXPECT_EQ(policy_budgets(Policy{PolicyKind::kUniform}, s, roomy, rng),
            std::vector<int>(8, 16));
}

TEST(PolicyTest, RoutingPolicies) {
  std::mt19937_64 rng(2);
  const ScoreVector s({0.2, 0.9, 0.4, 0.7});
  const AllocationConfig cfg{.k_min = 4, .k_max = 10, .b_max = 25};
  EXPECT_EQ(policy_budgets(Policy{PolicyKind::kTopK}, s, cfg, rng),
            (std::vector<int>{0, 10, 0, 10}));
  EXPECT_EQ(policy_budgets(Policy{PolicyKind::kAdversarial}, s, cfg, rng),
            (std::vector<int>{10, 0, 10, 0}));
  const auto dropped = policy_budgets(Policy{PolicyKind::kRandomDrop}, s, cfg, rng);
  EXPECT_EQ(std::accumulate(dropped.begin(), dropped.end(), 0), 20);

  const AllocationConfig unconstrained{.k_min = 4, .k_max = 10, .b_max = 1000};
  EXPECT_EQ(policy_budgets(Policy{PolicyKind::kTopK}, s, unconstrained, rng),
            std::vector<int>(4, 10));

  const Policy half{PolicyKind::kRandomDrop, 0.5};
  const auto kept = policy_budgets(half, s, unconstrained, rng);
  EXPECT_EQ(std::count(kept.begin(), kept.end(), 10), 2);
  EXPECT_THROW(policy_budgets(Policy{PolicyKind::kRandomDrop, 1.5}, s,
                              unconstrained, rng),
               Error);
}

TEST(PolicyTest, HardPruningMayZeroSegments) {
  std::mt19937_64 rng(3);
  const ScoreVector s({0.9, 0.1, 0.5});
  const AllocationConfig cfg{.k_min = 4, .k_max = 128, .b_max = 100};
  const auto b = policy_budgets(Policy{PolicyKind::kHardPruning}, s, cfg, rng);
  EXPECT_EQ(b[1], 0);
  EXPECT_EQ(std::accumulate(b.begin(), b.end(), 0), 100);
}

TEST(PolicyProperty, EveryPolicyRespectsTheBudget) {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 40; ++iter) {
    const int n = std::uniform_int_distribution<int>(1, 16)(rng);
    const Episode ep = generate_episode(EpisodeSpec{
        .n_segments = n, .seed = static_cast<std::uint64_t>(iter)});
    const int k_max = 32;
    const AllocationConfig cfg{
        .k_min = 2, .k_max = k_max,
        .b_max = std::uniform_int_distribution<int>(2 * n, k_max * n)(rng)};
    const ScorerSpec scorer{.noise_sigma = 0.5, .seed = 1};
    const ScoreVector scores = score_episode(scorer, ep.query, ep.segments);
    const auto blocks = full_blocks(ep, k_max);
    for (const Policy& p : policy_zoo()) {
      const AssembledSequence seq =
          apply_policy(p, scores, blocks, cfg, PipelineConfig{}, rng);
      ASSERT_LE(seq.total_tokens, cfg.b_max) << policy_name(p.kind);
      for (const SequenceEntry& e : seq.entries) {
        ASSERT_LE(e.token_count, k_max);
        ASSERT_GE(e.token_count, 1);
      }
    }
  }
}

TEST(PolicyTest, AdversarialExcludesTheNeedle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Episode ep = generate_episode(EpisodeSpec{.seed = seed});
    const ScoreVector scores =
        score_episode(ScorerSpec{.seed = seed}, ep.query, ep.segments);
    const AllocationConfig cfg{.k_min = 4, .k_max = 64, .b_max = 512};
    std::mt19937_64 rng(seed);
    const AssembledSequence seq =
        apply_policy(Policy{PolicyKind::kAdversarial}, scores,
                     full_blocks(ep, 64), cfg, PipelineConfig{}, rng);
    ASSERT_FALSE(seq.entries.empty());
    for (const SequenceEntry& e : seq.entries) {
      EXPECT_NE(e.segment_index, ep.needle_segments[0]);
    }
    EXPECT_NE(read_answer(seq, ep.query, ep.vocabulary), ep.needle_id);
  }
}

TEST(PolicyTest, ApplyPolicyChecksBlocks) {
  const Episode ep = generate_episode(EpisodeSpec{.n_segments = 3});
  const ScoreVector scores({0.5, 0.5, 0.5});
  auto blocks = full_blocks(ep, 8);
  blocks.pop_back();
  std::mt19937_64 rng(5);
  const AllocationConfig cfg{.k_min = 1, .k_max = 8, .b_max = 24};
  EXPECT_THROW(apply_policy(Policy{}, scores, blocks, cfg, PipelineConfig{}, rng),
               Error);
}

TEST(ReadAnswerTest, RecoversNeedleFromFullSequence) {
  const Episode ep = generate_episode(EpisodeSpec{.n_segments = 4, .seed = 12});
  const auto blocks = full_blocks(ep, 8, 0.05);
  const std::vector<int> budgets(4, 8);
  const AssembledSequence seq =
      assemble(std::vector<MemoryBlock>(blocks.begin(), blocks.end()), budgets,
               PipelineConfig{});
  EXPECT_EQ(read_answer(seq, ep.query, ep.vocabulary), ep.needle_id);
}

TEST(ReadAnswerTest, EmptySequenceHasNoEvidence) {
  const Episode ep = generate_episode(EpisodeSpec{});
  try {
    read_answer(AssembledSequence{}, ep.query, ep.vocabulary);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoEvidence);
  }
}

TEST(ReadAnswerProperty, WithoutTheNeedleSegmentAnswersAreWrong) {
  int correct = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Episode ep =
        generate_episode(EpisodeSpec{.n_segments = 4, .seed = seed});
    std::vector<int> budgets(4, 8);
    budgets[ep.needle_segments[0]] = 0;
    std::vector<MemoryBlock> blocks;
    for (const MemoryBlock& b : full_blocks(ep, 8)) {
      blocks.push_back(budgets[b.segment_index()] == 0
                           ? MemoryBlock(b.segment_index(), b.dim())
                           : b);
    }
    const AssembledSequence seq =
        assemble(std::move(blocks), budgets, PipelineConfig{});
    correct += read_answer(seq, ep.query, ep.vocabulary) == ep.needle_id;
  }
  // Chance over a 64-atom vocabulary is 1/64; the needle never appears here.
  EXPECT_LE(correct / 500.0, 1.0 / 64.0);
}

TEST(AblationTest, SingleTrial) {
  AblationConfig cfg;
  cfg.trials = 1;
  const RunReport r = run_ablation(cfg);
  EXPECT_EQ(r.trials, 1);
  EXPECT_EQ(r.policies.size(), 8u);
  EXPECT_EQ(r.utilization.size(), 1u);
  EXPECT_EQ(r.segments_scored, 32);
  for (const PolicyResult& p : r.policies) {
    EXPECT_TRUE(p.accuracy == 0.0 || p.accuracy == 1.0);
  }
}

TEST(AblationTest, ParallelMatchesReference) {
  AblationConfig cfg;
  cfg.trials = 40;
  cfg.episode.seed = 11;
  cfg.scorer.noise_sigma = 0.3;
  EXPECT_EQ(run_ablation(cfg), run_ablation_reference(cfg));
}

TEST(AblationTest, SeedChangesOutcome) {
  AblationConfig a;
  a.trials = 40;
  a.scorer.noise_sigma = 0.5;
  AblationConfig b = a;
  b.episode.seed = 1;
  EXPECT_NE(run_ablation(a).utilization, run_ablation(b).utilization);
}

TEST(AblationTest, HistogramCountsEverySegment) {
  AblationConfig cfg;
  cfg.trials = 30;
  const RunReport r = run_ablation(cfg);
  const auto total =
      std::accumulate(r.histogram.counts.begin(), r.histogram.counts.end(),
                      std::int64_t{0});
  EXPECT_EQ(total, r.segments_scored);
  EXPECT_EQ(r.histogram.counts.size(), 16u);
  EXPECT_DOUBLE_EQ(r.histogram.edges.back(), 64.0);
}

TEST(AblationTest, HistogramEdges) {
  Histogram h = make_histogram(128);
  add_to_histogram(h, 0);
  add_to_histogram(h, 7);
  add_to_histogram(h, 8);
  add_to_histogram(h, 128);
  EXPECT_EQ(h.counts[0], 2);
  EXPECT_EQ(h.counts[1], 1);
  EXPECT_EQ(h.counts[15], 1);
}

TEST(AblationTest, InvalidConfig) {
  AblationConfig cfg;
  cfg.trials = 0;
  EXPECT_THROW(run_ablation(cfg), Error);
}

TEST(UtilizationTest, TokensPerFrameBound) {
  EXPECT_DOUBLE_EQ(tokens_per_frame_bound(4096, 1024), 4.0);
  EXPECT_DOUBLE_EQ(tokens_per_frame_bound(12288, 2048), 6.0);
  EXPECT_NEAR(tokens_per_frame_bound(16384, 180), 91.02, 0.005);
  try {
    tokens_per_frame_bound(4096, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivisionByZero);
  }
}

TEST(UtilizationTest, DatasetAverageCapacity) {
  const std::vector<int> eight(10, 32);
  EXPECT_DOUBLE_EQ(dataset_avg_capacity(10, 4096, eight), 128.0);
  const std::vector<int> mixed{32, 32, 64, 64};
  EXPECT_DOUBLE_EQ(dataset_avg_capacity(4, 4096, mixed), 85.0 + 1.0 / 3.0);
  const std::vector<int> mixed2{32, 64};
  EXPECT_DOUBLE_EQ(dataset_avg_capacity(2, 4608, mixed2), 96.0);
  const std::vector<int> one{1};
  EXPECT_DOUBLE_EQ(dataset_avg_capacity(1, 37, one), 37.0);
  EXPECT_THROW(dataset_avg_capacity(0, 4096, std::vector<int>{}), Error);
}

TEST(UtilizationTest, PerFrameRange) {
  const auto [lo, hi] =
      per_frame_range(AllocationConfig{.k_min = 4, .k_max = 128}, 8);
  EXPECT_DOUBLE_EQ(lo, 0.5);
  EXPECT_DOUBLE_EQ(hi, 16.0);
}

TEST(AblationProperty, HeadTruncationBeatsTailWhenBlocksOverflow) {
  AblationConfig cfg;
  cfg.trials = 150;
  cfg.episode.atoms_per_segment = 32;
  cfg.policies = {Policy{PolicyKind::kAta}, Policy{PolicyKind::kAtaTailTruncate}};
  const RunReport r = run_ablation(cfg);
  EXPECT_GE(result_for(r, "ata").accuracy - result_for(r, "ata_tail_truncate").accuracy,
            0.20);
}

TEST(AblationProperty, AnchorsKeepEverySegment) {
  AblationConfig cfg;
  cfg.trials = 100;
  cfg.scorer.noise_sigma = 0.3;
  cfg.policies = {Policy{PolicyKind::kAta}, Policy{PolicyKind::kHardPruning}};
  const RunReport r = run_ablation(cfg);
  EXPECT_EQ(result_for(r, "ata").full_coverage_trials, r.trials);
  EXPECT_GE(r.trials - result_for(r, "hard_pruning").full_coverage_trials,
            static_cast<int>(0.95 * r.trials));
}

}  // namespace
}  // namespace tokenbudget
