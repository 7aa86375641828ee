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

#include <memory>
#include <string>
#include <string_view>

namespace tokenbudget {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Handles a POST /allocate body: {"scores": [...], "k_min", "k_max",
// "budget"} plus optional "epsilon" and "uniform_fallback". Replies 200 with
// the plan document, 400 with {"error": {"code", "message", "offset"}} for
// malformed or invalid input, and 422 for an infeasible budget.
HttpReply handle_allocate(std::string_view body);

// Stateless HTTP front end: POST /allocate and GET /healthz.
class AllocationService {
 public:
  AllocationService();
  ~AllocationService();
  AllocationService(const AllocationService&) = delete;
  AllocationService& operator=(const AllocationService&) = delete;

  // Binds host:port; port 0 picks a free port. Returns the bound port or
  // throws std::runtime_error.
  int bind(const std::string& host, int port);
  // Blocks serving requests until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tokenbudget
