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

#include <vector>

namespace tokenbudget {

// A latent content atom: a unit vector plus its vocabulary id.
struct Atom {
  int id = 0;
  std::vector<double> vec;
};

// Synthetic stand-in for the visual content of one segment.
struct SegmentContent {
  int segment_index = 0;
  std::vector<Atom> atoms;
};

}  // namespace tokenbudget
