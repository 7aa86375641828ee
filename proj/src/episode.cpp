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

#include "tokenbudget/episode.h"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "tokenbudget/error.h"
#include "tokenbudget/vector_math.h"

namespace tokenbudget {

void EpisodeSpec::validate() const {
  if (n_segments < 1 || atoms_per_segment < 1 || embed_dim < 2 ||
      vocab_size < atoms_per_segment || needle_count < 1 ||
      !(query_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("invalid episode spec: n_segments={} "
                            "atoms_per_segment={} embed_dim={} vocab_size={} "
                            "needle_count={} query_noise_sigma={}",
                            n_segments, atoms_per_segment, embed_dim,
                            vocab_size, needle_count, query_noise_sigma));
  }
}

Vocabulary::Vocabulary(int dim, std::vector<double> data)
    : dim_(dim), data_(std::move(data)) {
  if (dim < 1 || data_.size() % dim != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} values do not form atoms of width {}",
                            data_.size(), dim));
  }
}

std::span<const double> Vocabulary::atom(int id) const {
  return std::span<const double>(data_).subspan(
      static_cast<std::size_t>(id) * dim_, dim_);
}

int Vocabulary::nearest(std::span<const double> v) const {
  if (v.size() != static_cast<std::size_t>(dim_)) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("vector of dim {} vs vocabulary dim {}", v.size(),
                            dim_));
  }
  int best_id = 0;
  double best = -2.0;
  for (int id = 0; id < size(); ++id) {
    const double c = cosine(v, atom(id));
    if (c > best) {
      best = c;
      best_id = id;
    }
  }
  return best_id;
}

Episode generate_episode(const EpisodeSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = spec.embed_dim;

  std::vector<double> table(static_cast<std::size_t>(spec.vocab_size) * dim);
  for (int id = 0; id < spec.vocab_size; ++id) {
    std::span<double> v(table.data() + static_cast<std::size_t>(id) * dim, dim);
    // Resample the (measure-zero) all-zero draw so every atom is unit norm.
    do {
      for (double& x : v) x = gauss(rng);
    } while (l2_norm(v) == 0.0);
    normalize_in_place(v);
  }

  Episode ep;
  ep.vocabulary = Vocabulary(dim, std::move(table));
  ep.needle_id =
      std::uniform_int_distribution<int>(0, spec.vocab_size - 1)(rng);

  std::vector<int> order(spec.n_segments);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int needles = std::min(spec.needle_count, spec.n_segments);
  ep.needle_segments.assign(order.begin(), order.begin() + needles);
  std::sort(ep.needle_segments.begin(), ep.needle_segments.end());

  // Distractors never reuse the needle id, so only needle segments hold it.
  std::uniform_int_distribution<int> distractor(0, spec.vocab_size - 2);
  auto draw_distractor = [&] {
    if (spec.vocab_size == 1) return ep.needle_id;
    const int id = distractor(rng);
    return id >= ep.needle_id ? id + 1 : id;
  };
  std::uniform_int_distribution<int> slot(0, spec.atoms_per_segment - 1);

  ep.segments.resize(spec.n_segments);
  for (int s = 0; s < spec.n_segments; ++s) {
    SegmentContent& seg = ep.segments[s];
    seg.segment_index = s;
    const bool has_needle = std::binary_search(
        ep.needle_segments.begin(), ep.needle_segments.end(), s);
    const int needle_slot = has_needle ? slot(rng) : -1;
    for (int a = 0; a < spec.atoms_per_segment; ++a) {
      const int id = a == needle_slot ? ep.needle_id : draw_distractor();
      const auto v = ep.vocabulary.atom(id);
      seg.atoms.push_back(Atom{id, std::vector<double>(v.begin(), v.end())});
    }
  }

  const auto needle = ep.vocabulary.atom(ep.needle_id);
  ep.query.assign(needle.begin(), needle.end());
  if (spec.query_noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.query_noise_sigma);
    for (double& x : ep.query) x += noise(rng);
    normalize_in_place(ep.query);
  }
  return ep;
}

}  // namespace tokenbudget
