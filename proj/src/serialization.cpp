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

#include "tokenbudget/serialization.h"

#include <fmt/format.h>

#include <cstdint>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>

#include "tokenbudget/error.h"

namespace tokenbudget {
namespace {

using nlohmann::json;

// Byte offset of `"key"` in the source, or 0 when it cannot be located.
std::size_t key_offset(std::string_view doc, std::string_view key) {
  const std::size_t at = doc.find(fmt::format("\"{}\"", key));
  return at == std::string_view::npos ? 0 : at;
}

[[noreturn]] void parse_fail(std::string_view doc, std::string_view key,
                             const std::string& what) {
  throw Error(ErrorCode::kParseError, what, key_offset(doc, key));
}

json parse_json(std::string_view doc) {
  try {
    return json::parse(doc.begin(), doc.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), e.byte);
  }
}

void require_exact_fields(std::string_view doc, const json& obj,
                          std::string_view what,
                          std::initializer_list<std::string_view> fields) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kParseError,
                fmt::format("{} must be a JSON object", what), 0);
  }
  const std::set<std::string_view> allowed(fields);
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      parse_fail(doc, key, fmt::format("unknown field '{}' in {}", key, what));
    }
  }
  for (std::string_view field : fields) {
    if (!obj.contains(field)) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("missing field '{}' in {}", field, what),
                  doc.size());
    }
  }
}

int get_int(std::string_view doc, const json& obj, std::string_view key) {
  const json& v = obj.at(std::string(key));
  if (!v.is_number_integer()) {
    parse_fail(doc, key, fmt::format("field '{}' must be an integer", key));
  }
  const auto value = v.get<std::int64_t>();
  if (value < INT32_MIN || value > INT32_MAX) {
    parse_fail(doc, key, fmt::format("field '{}' is out of range", key));
  }
  return static_cast<int>(value);
}

std::vector<int> get_int_array(std::string_view doc, const json& obj,
                               std::string_view key) {
  const json& v = obj.at(std::string(key));
  if (!v.is_array()) {
    parse_fail(doc, key, fmt::format("field '{}' must be an array", key));
  }
  std::vector<int> out;
  out.reserve(v.size());
  for (const json& item : v) {
    if (!item.is_number_integer()) {
      parse_fail(doc, key,
                 fmt::format("field '{}' must hold only integers", key));
    }
    out.push_back(item.get<int>());
  }
  return out;
}

}  // namespace

std::string serialize_plan(const AllocationPlan& plan) {
  json doc;
  doc["budgets"] = plan.budgets;
  doc["stage"] = std::string(stage_name(plan.stage));
  doc["b_base"] = plan.b_base;
  doc["b_res"] = plan.b_res;
  doc["total"] = plan.total;
  return doc.dump();
}

AllocationPlan parse_plan(std::string_view document) {
  const json doc = parse_json(document);
  require_exact_fields(document, doc, "plan",
                       {"budgets", "stage", "b_base", "b_res", "total"});
  AllocationPlan plan;
  plan.budgets = get_int_array(document, doc, "budgets");
  const json& stage = doc.at("stage");
  if (!stage.is_string()) parse_fail(document, "stage", "'stage' must be a string");
  const auto parsed = parse_stage(stage.get<std::string>());
  if (!parsed) {
    parse_fail(document, "stage",
               fmt::format("unknown stage '{}'", stage.get<std::string>()));
  }
  plan.stage = *parsed;
  plan.b_base = get_int(document, doc, "b_base");
  plan.b_res = get_int(document, doc, "b_res");
  plan.total = get_int(document, doc, "total");
  const std::int64_t sum = std::accumulate(
      plan.budgets.begin(), plan.budgets.end(), std::int64_t{0});
  if (sum != plan.total) {
    parse_fail(document, "total",
               fmt::format("total {} does not match the budget sum {}",
                           plan.total, sum));
  }
  return plan;
}

std::string serialize_sequence(const AssembledSequence& seq) {
  json entries = json::array();
  int dim = 0;
  for (const SequenceEntry& entry : seq.entries) {
    dim = entry.block.dim();
    json rows = json::array();
    for (int r = 0; r < entry.block.rows(); ++r) {
      const auto values = entry.block.row(r);
      rows.push_back(std::vector<double>(values.begin(), values.end()));
    }
    const auto ids = entry.block.atom_ids();
    entries.push_back({{"segment_index", entry.segment_index},
                       {"tag", entry.tag},
                       {"token_count", entry.token_count},
                       {"atom_ids", std::vector<int>(ids.begin(), ids.end())},
                       {"rows", std::move(rows)}});
  }
  json doc;
  doc["entries"] = std::move(entries);
  doc["dim"] = dim;
  doc["total_tokens"] = seq.total_tokens;
  return doc.dump();
}

AssembledSequence parse_sequence(std::string_view document) {
  const json doc = parse_json(document);
  require_exact_fields(document, doc, "sequence",
                       {"entries", "dim", "total_tokens"});
  const int dim = get_int(document, doc, "dim");
  AssembledSequence seq;
  seq.total_tokens = get_int(document, doc, "total_tokens");
  const json& entries = doc.at("entries");
  if (!entries.is_array()) {
    parse_fail(document, "entries", "'entries' must be an array");
  }
  std::int64_t sum = 0;
  for (const json& item : entries) {
    require_exact_fields(
        document, item, "sequence entry",
        {"segment_index", "tag", "token_count", "atom_ids", "rows"});
    SequenceEntry entry;
    entry.segment_index = get_int(document, item, "segment_index");
    if (!item.at("tag").is_string()) {
      parse_fail(document, "tag", "'tag' must be a string");
    }
    entry.tag = item.at("tag").get<std::string>();
    parse_timestamp_tag(entry.tag);
    entry.token_count = get_int(document, item, "token_count");
    std::vector<int> ids = get_int_array(document, item, "atom_ids");
    std::vector<double> data;
    const json& rows = item.at("rows");
    if (!rows.is_array() || rows.size() != ids.size() ||
        static_cast<int>(ids.size()) != entry.token_count) {
      parse_fail(document, "rows", "row count disagrees with token_count");
    }
    for (const json& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        parse_fail(document, "rows", "row width disagrees with dim");
      }
      for (const json& x : row) {
        if (!x.is_number()) parse_fail(document, "rows", "rows must be numeric");
        data.push_back(x.get<double>());
      }
    }
    try {
      entry.block = MemoryBlock(entry.segment_index, dim, std::move(data),
                                std::move(ids));
    } catch (const Error& e) {
      parse_fail(document, "rows", e.what());
    }
    sum += entry.token_count;
    seq.entries.push_back(std::move(entry));
  }
  if (sum != seq.total_tokens) {
    parse_fail(document, "total_tokens",
               "total_tokens does not match the entry sum");
  }
  return seq;
}

}  // namespace tokenbudget
