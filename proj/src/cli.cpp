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

#include "tokenbudget/cli.h"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tokenbudget/ablation.h"
#include "tokenbudget/allocation.h"
#include "tokenbudget/config.h"
#include "tokenbudget/error.h"
#include "tokenbudget/report.h"
#include "tokenbudget/serialization.h"
#include "tokenbudget/service.h"

namespace tokenbudget {
namespace {

namespace fs = std::filesystem;

std::string read_text(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Plain text (numbers separated by whitespace or commas) or a JSON array,
// chosen by the first non-blank byte.
std::vector<double> parse_scores(std::string_view text) {
  const auto first = std::find_if_not(text.begin(), text.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
  if (first != text.end() && *first == '[') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError, e.what(), e.byte);
    }
    std::vector<double> out;
    for (const auto& v : doc) {
      if (!v.is_number()) {
        throw Error(ErrorCode::kParseError, "score array must hold numbers");
      }
      out.push_back(v.get<double>());
    }
    return out;
  }

  std::vector<double> out;
  std::size_t pos = 0;
  auto is_sep = [](char c) {
    return c == ',' || std::isspace(static_cast<unsigned char>(c));
  };
  while (pos < text.size()) {
    if (is_sep(text[pos])) {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < text.size() && !is_sep(text[end])) ++end;
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data() + pos, text.data() + end, value);
    if (ec != std::errc() || ptr != text.data() + end) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("'{}' is not a number", text.substr(pos, end - pos)),
                  pos);
    }
    out.push_back(value);
    pos = end;
  }
  return out;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kBudgetInfeasible:
      return kExitInfeasible;
    case ErrorCode::kParseError:
    case ErrorCode::kEmptyScores:
    case ErrorCode::kInvalidScore:
    case ErrorCode::kInvalidConfig:
      return kExitParseError;
    default:
      return kExitFailure;
  }
}

struct AllocateArgs {
  std::string scores_file;
  AllocationConfig cfg;
};

struct RunArgs {
  std::string config;
  std::string out = "report";
  std::optional<std::uint64_t> seed;
};

int cmd_allocate(const AllocateArgs& args, std::ostream& out) {
  const ScoreVector scores(parse_scores(read_text(args.scores_file)));
  out << serialize_plan(allocate(scores, args.cfg)) << "\n";
  return kExitOk;
}

std::vector<AblationConfig> load_runs(const RunArgs& args) {
  std::vector<AblationConfig> runs =
      args.config.empty() ? std::vector<AblationConfig>{AblationConfig{}}
                          : parse_run_config(read_text(args.config));
  if (args.seed) {
    for (AblationConfig& run : runs) run.episode.seed = *args.seed;
  }
  return runs;
}

int cmd_run(const RunArgs& args, bool ata_only, int verbosity,
            std::ostream& out, std::ostream& err) {
  std::vector<AblationConfig> runs = load_runs(args);
  for (const AblationConfig& base : runs) {
    AblationConfig run = base;
    if (ata_only) run.policies = {Policy{PolicyKind::kAta, std::nullopt}};
    const fs::path dir =
        runs.size() == 1 ? fs::path(args.out)
                         : fs::path(args.out) /
                               fmt::format("budget_{}", run.allocation.b_max);
    if (verbosity > 0) {
      err << fmt::format("running {} trials, budget {}, seed {} -> {}\n",
                         run.trials, run.allocation.b_max, run.episode.seed,
                         dir.string());
    }
    const RunReport report = run_ablation(run);
    emit_report(report, dir);
    std::ofstream json_out(dir / "run.json", std::ios::binary);
    json_out << report_to_json(report);
    if (!json_out) {
      throw std::runtime_error(fmt::format("cannot write {}", (dir / "run.json").string()));
    }
    out << fmt::format("== budget {} ==\n", run.allocation.b_max)
        << summary_table(report);
  }
  return kExitOk;
}

int cmd_report(const RunArgs& args, std::ostream& out) {
  if (args.config.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "report needs --config <run.json>");
  }
  const RunReport report = report_from_json(read_text(args.config));
  emit_report(report, args.out);
  out << summary_table(report);
  return kExitOk;
}

int cmd_serve(const std::string& bind, std::ostream& err) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("--bind expects host:port, got '{}'", bind));
  }
  const std::string host = bind.substr(0, colon);
  int port = 0;
  const std::string port_text = bind.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(
      port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() ||
      port < 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidConfig,
                fmt::format("invalid port in '{}'", bind));
  }
  AllocationService service;
  const int bound = service.bind(host, port);
  err << fmt::format("listening on {}:{}\n", host, bound) << std::flush;
  service.listen();
  return kExitOk;
}

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config, "Run configuration (JSON)");
  cmd->add_option("--out", args.out, "Output directory")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "Master seed override");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Budgeted token allocation for long-video compression"};
  app.name("tokenbudget");
  app.require_subcommand(1, 1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Verbose diagnostics");

  AllocateArgs alloc;
  auto* allocate_cmd =
      app.add_subcommand("allocate", "Print the allocation plan for a score file");
  allocate_cmd
      ->add_option("scores", alloc.scores_file,
                   "Score file: numbers or a JSON array ('-' for stdin)")
      ->required();
  allocate_cmd->add_option("--k-min", alloc.cfg.k_min, "Anchor tokens per segment")
      ->capture_default_str();
  allocate_cmd->add_option("--k-max", alloc.cfg.k_max, "Tokens per full segment")
      ->capture_default_str();
  allocate_cmd->add_option("--budget", alloc.cfg.b_max, "Global token budget")
      ->capture_default_str();
  allocate_cmd->add_option("--epsilon", alloc.cfg.epsilon, "Guard constant")
      ->capture_default_str();
  allocate_cmd->add_flag("--uniform-fallback", alloc.cfg.uniform_fallback,
                         "Spread the budget evenly when all scores are equal");

  RunArgs simulate_args, ablate_args, report_args;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Run the ATA pipeline on synthetic episodes");
  add_run_options(simulate_cmd, simulate_args);
  auto* ablate_cmd =
      app.add_subcommand("ablate", "Compare allocation policies on synthetic episodes");
  add_run_options(ablate_cmd, ablate_args);
  auto* report_cmd =
      app.add_subcommand("report", "Re-render report files from a saved run.json");
  add_run_options(report_cmd, report_args);

  std::string bind = "127.0.0.1:8080";
  auto* serve_cmd = app.add_subcommand("serve", "Serve POST /allocate over HTTP");
  serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (allocate_cmd->parsed()) return cmd_allocate(alloc, out);
    if (simulate_cmd->parsed()) {
      return cmd_run(simulate_args, /*ata_only=*/true, verbosity, out, err);
    }
    if (ablate_cmd->parsed()) {
      return cmd_run(ablate_args, /*ata_only=*/false, verbosity, out, err);
    }
    if (report_cmd->parsed()) return cmd_report(report_args, out);
    if (serve_cmd->parsed()) return cmd_serve(bind, err);
  } catch (const Error& e) {
    err << fmt::format("error [{}]: {}\n", error_code_name(e.code()), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace tokenbudget
