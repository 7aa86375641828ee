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
#include <vector>

#include "tokenbudget/segment.h"

namespace tokenbudget {

struct EpisodeSpec {
  int n_segments = 32;
  int atoms_per_segment = 8;
  int embed_dim = 32;
  int vocab_size = 64;
  int needle_count = 1;
  double query_noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Fixed table of random unit vectors indexed by atom id.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(int dim, std::vector<double> data);

  int size() const { return dim_ == 0 ? 0 : static_cast<int>(data_.size()) / dim_; }
  int dim() const { return dim_; }
  std::span<const double> atom(int id) const;

  // Id of the atom with the highest cosine to `v`; ties go to the lower id.
  int nearest(std::span<const double> v) const;

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

// One needle-retrieval trial. The needle atom appears in exactly the
// segments listed in needle_segments and nowhere else.
struct Episode {
  Vocabulary vocabulary;
  std::vector<SegmentContent> segments;
  std::vector<double> query;
  int needle_id = 0;
  std::vector<int> needle_segments;
};

// Deterministic in spec.seed. The query is the needle vector plus
// per-component Gaussian noise, renormalized.
Episode generate_episode(const EpisodeSpec& spec);

}  // namespace tokenbudget
