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
#include <random>
#include <span>
#include <vector>

#include "tokenbudget/allocation.h"
#include "tokenbudget/segment.h"

namespace tokenbudget {

// Frozen "Yes"/"No" head weights used to read a relevance judgment off a
// hidden state.
struct RelevanceProbe {
  std::vector<double> w_yes;
  std::vector<double> w_no;
};

struct HiddenState {
  std::vector<double> h;
};

enum class ScorerKind { kProbe, kOracle };

struct ScorerSpec {
  ScorerKind kind = ScorerKind::kOracle;
  // Standard deviation of Gaussian noise added to the logit.
  double noise_sigma = 0.0;
  // Logistic slope applied to (similarity - 0.5).
  double sharpness = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Logistic function clamped into the open unit interval, so saturated
// logits still yield a valid score.
double sigmoid(double logit);

// sigmoid((w_yes - w_no) . h). Throws kDimensionMismatch when the probe
// vectors and the hidden state disagree in size or are empty.
double probe_score(const RelevanceProbe& probe, std::span<const double> h);

// sigmoid(sharpness * (max_a cos(query, a) - 0.5) + N(0, noise_sigma)).
// Noise is drawn from `rng` only when noise_sigma > 0.
double oracle_score(const ScorerSpec& spec, std::span<const double> query,
                    std::span<const Atom> atoms, std::mt19937_64& rng);

// One oracle score per segment, in order, from a generator seeded with
// spec.seed. Per-segment failures are rethrown with the segment index.
ScoreVector score_episode(const ScorerSpec& spec,
                          std::span<const double> query,
                          std::span<const SegmentContent> segments);

ScoreVector score_episode(const RelevanceProbe& probe,
                          std::span<const HiddenState> states);

}  // namespace tokenbudget
