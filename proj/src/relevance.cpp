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

#include "tokenbudget/relevance.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "tokenbudget/error.h"
#include "tokenbudget/vector_math.h"

namespace tokenbudget {
namespace {

template <typename Fn>
auto with_segment_context(std::size_t index, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("segment {}: {}", index, e.what()),
                e.offset());
  }
}

}  // namespace

void ScorerSpec::validate() const {
  if (!(noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("noise_sigma must be >= 0, got {}", noise_sigma));
  }
  if (!(sharpness > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("sharpness must be > 0, got {}", sharpness));
  }
}

double sigmoid(double logit) {
  double p;
  if (logit >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-logit));
  } else {
    const double e = std::exp(logit);
    p = e / (1.0 + e);
  }
  constexpr double kLo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, kLo, hi);
}

double probe_score(const RelevanceProbe& probe, std::span<const double> h) {
  if (probe.w_yes.empty() || probe.w_yes.size() != probe.w_no.size() ||
      probe.w_yes.size() != h.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("probe dims ({}, {}) vs hidden state dim {}",
                            probe.w_yes.size(), probe.w_no.size(), h.size()));
  }
  double logit = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    logit += (probe.w_yes[i] - probe.w_no[i]) * h[i];
  }
  return sigmoid(logit);
}

double oracle_score(const ScorerSpec& spec, std::span<const double> query,
                    std::span<const Atom> atoms, std::mt19937_64& rng) {
  spec.validate();
  if (atoms.empty()) {
    throw Error(ErrorCode::kEmptySegment, "segment has no content atoms");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const Atom& atom : atoms) {
    if (atom.vec.size() != query.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("atom {} has dim {}, query has dim {}", atom.id,
                              atom.vec.size(), query.size()));
    }
    best = std::max(best, cosine(query, atom.vec));
  }
  double logit = spec.sharpness * (best - 0.5);
  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    logit += noise(rng);
  }
  return sigmoid(logit);
}

ScoreVector score_episode(const ScorerSpec& spec,
                          std::span<const double> query,
                          std::span<const SegmentContent> segments) {
  if (spec.kind != ScorerKind::kOracle) {
    throw Error(ErrorCode::kInvalidConfig,
                "probe scoring needs a RelevanceProbe and hidden states");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<double> scores;
  scores.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    scores.push_back(with_segment_context(i, [&] {
      return oracle_score(spec, query, segments[i].atoms, rng);
    }));
  }
  return ScoreVector(std::move(scores));
}

ScoreVector score_episode(const RelevanceProbe& probe,
                          std::span<const HiddenState> states) {
  std::vector<double> scores;
  scores.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    scores.push_back(
        with_segment_context(i, [&] { return probe_score(probe, states[i].h); }));
  }
  return ScoreVector(std::move(scores));
}

}  // namespace tokenbudget
