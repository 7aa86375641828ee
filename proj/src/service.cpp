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

#include "tokenbudget/service.h"

#include <fmt/format.h>
#include <httplib.h>

#include <cstdint>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

#include "tokenbudget/allocation.h"
#include "tokenbudget/error.h"
#include "tokenbudget/serialization.h"

namespace tokenbudget {
namespace {

using nlohmann::json;

HttpReply error_reply(int status, std::string_view code,
                      const std::string& message, std::size_t offset) {
  json body = {{"error",
                {{"code", code}, {"message", message}, {"offset", offset}}}};
  return HttpReply{status, body.dump(), "application/json"};
}

int request_int(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::kParseError,
                fmt::format("'{}' must be an integer", key));
  }
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::kParseError, fmt::format("'{}' is out of range", key));
  }
  return static_cast<int>(x);
}

AllocationPlan allocate_request(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body.begin(), body.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), e.byte);
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "request body must be a JSON object");
  }
  static const std::set<std::string> kAllowed = {
      "scores", "k_min", "k_max", "budget", "epsilon", "uniform_fallback"};
  for (const auto& [key, value] : doc.items()) {
    if (!kAllowed.contains(key)) {
      throw Error(ErrorCode::kParseError, fmt::format("unknown field '{}'", key));
    }
  }
  for (const char* key : {"scores", "k_min", "k_max", "budget"}) {
    if (!doc.contains(key)) {
      throw Error(ErrorCode::kParseError, fmt::format("missing field '{}'", key));
    }
  }
  const json& raw = doc.at("scores");
  if (!raw.is_array()) {
    throw Error(ErrorCode::kParseError, "'scores' must be an array of numbers");
  }
  std::vector<double> scores;
  scores.reserve(raw.size());
  for (const json& s : raw) {
    if (!s.is_number()) {
      throw Error(ErrorCode::kParseError, "'scores' must hold only numbers");
    }
    scores.push_back(s.get<double>());
  }

  AllocationConfig cfg;
  cfg.k_min = request_int(doc, "k_min");
  cfg.k_max = request_int(doc, "k_max");
  cfg.b_max = request_int(doc, "budget");
  if (doc.contains("epsilon")) {
    if (!doc.at("epsilon").is_number()) {
      throw Error(ErrorCode::kParseError, "'epsilon' must be a number");
    }
    cfg.epsilon = doc.at("epsilon").get<double>();
  }
  if (doc.contains("uniform_fallback")) {
    if (!doc.at("uniform_fallback").is_boolean()) {
      throw Error(ErrorCode::kParseError, "'uniform_fallback' must be a boolean");
    }
    cfg.uniform_fallback = doc.at("uniform_fallback").get<bool>();
  }
  return allocate(ScoreVector(std::move(scores)), cfg);
}

}  // namespace

HttpReply handle_allocate(std::string_view body) {
  try {
    return HttpReply{200, serialize_plan(allocate_request(body)),
                     "application/json"};
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::kBudgetInfeasible ? 422 : 400;
    return error_reply(status, error_code_name(e.code()), e.what(), e.offset());
  }
}

struct AllocationService::Impl {
  httplib::Server server;
};

AllocationService::AllocationService() : impl_(std::make_unique<Impl>()) {
  impl_->server.Post("/allocate",
                     [](const httplib::Request& req, httplib::Response& res) {
                       const HttpReply reply = handle_allocate(req.body);
                       res.status = reply.status;
                       res.set_content(reply.body, reply.content_type);
                     });
  impl_->server.Get("/healthz", [](const httplib::Request&,
                                   httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
}

AllocationService::~AllocationService() { stop(); }

int AllocationService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) {
      throw std::runtime_error(fmt::format("cannot bind {}:0", host));
    }
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error(fmt::format("cannot bind {}:{}", host, port));
  }
  return port;
}

void AllocationService::listen() { impl_->server.listen_after_bind(); }

void AllocationService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace tokenbudget
