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

#include <string_view>
#include <vector>

#include "tokenbudget/ablation.h"

namespace tokenbudget {

// Parses a run configuration document. Recognized fields:
//
//   n_segments, atoms_per_segment, embed_dim, vocab_size, needle_count,
//   query_noise_sigma, seed, budget, k_min, k_max, epsilon,
//   uniform_fallback, policies, trials, token_noise_sigma, frontload,
//   fps, window, f_max, scorer {noise_sigma, sharpness}
//
// `budget` may be an integer or an array of integers; an array yields one
// config per budget (a sweep). `policies` holds names or objects
// {"kind": name, "drop_fraction": x}; omitted means every policy.
// Absent fields keep AblationConfig defaults, except f_max which defaults
// to n_segments * window. Unknown fields and bad values throw
// kInvalidConfig with a JSON path such as "$.policies[2]".
std::vector<AblationConfig> parse_run_config(std::string_view document);

}  // namespace tokenbudget
