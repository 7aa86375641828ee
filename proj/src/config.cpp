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

#include "tokenbudget/config.h"

#include <fmt/format.h>

#include <cstdint>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <string>

#include "tokenbudget/error.h"

namespace tokenbudget {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, fmt::format("{}: {}", path, what));
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail(path + "." + key, "unknown field");
  }
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    fail(path, "integer out of range");
  return static_cast<int>(x);
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

template <typename T, typename Get>
void read(const json& obj, const char* key, const std::string& parent, T& dst,
          Get get) {
  if (obj.contains(key)) dst = get(obj.at(key), parent + "." + key);
}

Policy parse_policy(const json& v, const std::string& path) {
  Policy policy;
  const json* kind = &v;
  if (v.is_object()) {
    reject_unknown(v, path, {"kind", "drop_fraction"});
    if (!v.contains("kind")) fail(path + ".kind", "missing field");
    kind = &v.at("kind");
    if (v.contains("drop_fraction")) {
      const double f = as_double(v.at("drop_fraction"), path + ".drop_fraction");
      if (!(f >= 0.0 && f <= 1.0)) fail(path + ".drop_fraction", "must be in [0, 1]");
      policy.drop_fraction = f;
    }
  }
  if (!kind->is_string()) fail(path, "expected a policy name");
  const auto parsed = parse_policy_kind(kind->get<std::string>());
  if (!parsed) {
    fail(path, fmt::format("unknown policy '{}'", kind->get<std::string>()));
  }
  policy.kind = *parsed;
  return policy;
}

// Re-runs the component validators, tagging failures with the root path.
void validate_tagged(const AblationConfig& cfg) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail("$", e.what());
  }
}

}  // namespace

std::vector<AblationConfig> parse_run_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), e.byte);
  }
  const std::string root = "$";
  reject_unknown(doc, root,
                 {"n_segments", "atoms_per_segment", "embed_dim", "vocab_size",
                  "needle_count", "query_noise_sigma", "seed", "budget",
                  "k_min", "k_max", "epsilon", "uniform_fallback", "policies",
                  "trials", "token_noise_sigma", "frontload", "fps", "window",
                  "f_max", "scorer"});

  AblationConfig cfg;
  EpisodeSpec& ep = cfg.episode;
  read(doc, "n_segments", root, ep.n_segments, as_int);
  read(doc, "atoms_per_segment", root, ep.atoms_per_segment, as_int);
  read(doc, "embed_dim", root, ep.embed_dim, as_int);
  read(doc, "vocab_size", root, ep.vocab_size, as_int);
  read(doc, "needle_count", root, ep.needle_count, as_int);
  read(doc, "query_noise_sigma", root, ep.query_noise_sigma, as_double);
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned()) fail("$.seed", "expected a non-negative integer");
    ep.seed = s.get<std::uint64_t>();
  }
  read(doc, "k_min", root, cfg.allocation.k_min, as_int);
  read(doc, "k_max", root, cfg.allocation.k_max, as_int);
  read(doc, "epsilon", root, cfg.allocation.epsilon, as_double);
  read(doc, "uniform_fallback", root, cfg.allocation.uniform_fallback, as_bool);
  read(doc, "trials", root, cfg.trials, as_int);
  read(doc, "token_noise_sigma", root, cfg.token_noise_sigma, as_double);
  read(doc, "frontload", root, cfg.frontload, as_bool);
  read(doc, "fps", root, cfg.pipeline.fps, as_double);
  read(doc, "window", root, cfg.pipeline.window, as_int);
  cfg.pipeline.f_max = ep.n_segments * cfg.pipeline.window;
  read(doc, "f_max", root, cfg.pipeline.f_max, as_int);

  if (doc.contains("scorer")) {
    const json& sc = doc.at("scorer");
    reject_unknown(sc, "$.scorer", {"noise_sigma", "sharpness"});
    read(sc, "noise_sigma", "$.scorer", cfg.scorer.noise_sigma, as_double);
    read(sc, "sharpness", "$.scorer", cfg.scorer.sharpness, as_double);
  }

  if (doc.contains("policies")) {
    const json& list = doc.at("policies");
    if (!list.is_array()) fail("$.policies", "expected an array");
    cfg.policies.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.policies.push_back(
          parse_policy(list[i], fmt::format("$.policies[{}]", i)));
    }
  }

  std::vector<int> budgets{cfg.allocation.b_max};
  if (doc.contains("budget")) {
    const json& b = doc.at("budget");
    budgets.clear();
    if (b.is_array()) {
      if (b.empty()) fail("$.budget", "sweep needs at least one budget");
      for (std::size_t i = 0; i < b.size(); ++i) {
        budgets.push_back(as_int(b[i], fmt::format("$.budget[{}]", i)));
      }
    } else {
      budgets.push_back(as_int(b, "$.budget"));
    }
  }

  std::vector<AblationConfig> runs;
  for (int budget : budgets) {
    AblationConfig run = cfg;
    run.allocation.b_max = budget;
    run.pipeline.b_max = budget;
    validate_tagged(run);
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace tokenbudget
