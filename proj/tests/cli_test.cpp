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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tokenbudget/allocation.h"
#include "tokenbudget/report.h"
#include "tokenbudget/serialization.h"

namespace tokenbudget {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("tokenbudget_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << body;
    return p;
  }

  fs::path small_config() {
    return write("small.json",
                 R"({"n_segments": 8, "budget": 128, "k_min": 2, "k_max": 32,
                     "trials": 10, "scorer": {"noise_sigma": 0.3}})");
  }

  fs::path dir_;
};

TEST_F(CliTest, AllocateMatchesLibrary) {
  const fs::path scores = write("scores.txt", "0.9 0.1 0.5\n");
  for (int budget : {200, 100}) {
    const CliResult r = run({"allocate", scores.string(), "--k-min", "4",
                             "--k-max", "128", "--budget",
                             std::to_string(budget)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const AllocationPlan expected =
        allocate(ScoreVector({0.9, 0.1, 0.5}),
                 AllocationConfig{.k_min = 4, .k_max = 128, .b_max = budget});
    EXPECT_EQ(parse_plan(r.out), expected);
  }
}

TEST_F(CliTest, AllocateAcceptsJsonAndCommas) {
  const fs::path json = write("scores.json", "[0.9, 0.1, 0.5]");
  const fs::path commas = write("scores.csv", "0.9,0.1,\n0.5");
  const CliResult a = run({"allocate", json.string(), "--budget", "100"});
  const CliResult b = run({"allocate", commas.string(), "--budget", "100"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(parse_plan(a.out).budgets, (std::vector<int>{63, 4, 33}));
}

TEST_F(CliTest, AllocateExitCodes) {
  const fs::path scores = write("scores.txt", "0.9 0.1 0.5");
  const CliResult infeasible = run({"allocate", scores.string(), "--budget", "10"});
  EXPECT_EQ(infeasible.code, kExitInfeasible);
  EXPECT_NE(infeasible.err.find("BudgetInfeasible"), std::string::npos);

  EXPECT_EQ(run({"allocate", write("bad.txt", "0.9 abc").string()}).code,
            kExitParseError);
  EXPECT_EQ(run({"allocate", write("range.txt", "0.9 1.0").string()}).code,
            kExitParseError);
  EXPECT_EQ(run({"allocate", write("empty.txt", "").string()}).code,
            kExitParseError);
  EXPECT_EQ(run({"allocate", write("trunc.json", "[0.9, ").string()}).code,
            kExitParseError);
  EXPECT_EQ(run({"allocate", (dir_ / "missing.txt").string()}).code,
            kExitFailure);
  EXPECT_EQ(run({"bogus"}).code, kExitFailure);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(CliTest, AblateWritesReport) {
  const fs::path out = dir_ / "report";
  const CliResult r = run({"ablate", "--config", small_config().string(),
                           "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (std::string_view name : {kAccuracyTable, kHistogramTable,
                                kUtilizationTable, kSummaryTable,
                                kHistogramChart, kUtilizationChart}) {
    EXPECT_TRUE(fs::exists(out / name)) << name;
  }
  EXPECT_TRUE(fs::exists(out / "run.json"));
  EXPECT_NE(r.out.find("== budget 128 =="), std::string::npos);
  EXPECT_NE(r.out.find("hard_pruning"), std::string::npos);
}

TEST_F(CliTest, SimulateRunsOnlyAta) {
  const fs::path out = dir_ / "sim";
  const CliResult r = run({"simulate", "--config", small_config().string(),
                           "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string acc = slurp(out / kAccuracyTable);
  EXPECT_NE(acc.find("\nata,"), std::string::npos);
  EXPECT_EQ(acc.find("uniform"), std::string::npos);
}

TEST_F(CliTest, BundledConfigRuns) {
  const fs::path out = dir_ / "bundled";
  const CliResult r =
      run({"simulate", "--config",
           (fs::path(TOKENBUDGET_SOURCE_DIR) / "configs" / "default.json").string(),
           "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(out / kSummaryTable));
}

TEST_F(CliTest, SeedOverrideIsReproducible) {
  const fs::path cfg = small_config();
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  const fs::path c = dir_ / "c";
  ASSERT_EQ(run({"ablate", "--config", cfg.string(), "--out", a.string(),
                 "--seed", "7"}).code, kExitOk);
  ASSERT_EQ(run({"ablate", "--config", cfg.string(), "--out", b.string(),
                 "--seed", "7"}).code, kExitOk);
  ASSERT_EQ(run({"ablate", "--config", cfg.string(), "--out", c.string(),
                 "--seed", "8"}).code, kExitOk);
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  EXPECT_NE(slurp(a / kUtilizationTable), slurp(c / kUtilizationTable));
}

TEST_F(CliTest, SweepAccuracyIsNonDecreasing) {
  const fs::path out = dir_ / "sweep";
  const CliResult r =
      run({"ablate", "--config",
           (fs::path(TOKENBUDGET_SOURCE_DIR) / "configs" / "sweep.json").string(),
           "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  double previous = -1.0;
  double first = -1.0;
  for (int budget : {256, 512, 1024}) {
    const fs::path run_json = out / ("budget_" + std::to_string(budget)) / "run.json";
    ASSERT_TRUE(fs::exists(run_json));
    const RunReport report = report_from_json(slurp(run_json));
    const double acc = report.policies.at(0).accuracy;
    ASSERT_EQ(report.policies.at(0).policy, "ata");
    EXPECT_GE(acc, previous) << "budget " << budget;
    if (first < 0.0) first = acc;
    previous = acc;
  }
  // Front-loading is off in this config, so small budgets must hurt.
  EXPECT_GE(previous - first, 0.1);
}

TEST_F(CliTest, ReportRerendersFromRunJson) {
  const fs::path first = dir_ / "first";
  ASSERT_EQ(run({"ablate", "--config", small_config().string(), "--out",
                 first.string()}).code, kExitOk);
  const fs::path second = dir_ / "second";
  const CliResult r = run({"report", "--config", (first / "run.json").string(),
                           "--out", second.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (std::string_view name : {kAccuracyTable, kHistogramTable,
                                kUtilizationTable, kSummaryTable,
                                kHistogramChart, kUtilizationChart}) {
    EXPECT_EQ(slurp(first / name), slurp(second / name)) << name;
  }
  EXPECT_EQ(run({"report"}).code, kExitParseError);
}

TEST_F(CliTest, BadConfigExitsWithParseError) {
  const fs::path cfg = write("bad.json", R"({"policies": ["ata", "oracle"]})");
  const CliResult r = run({"ablate", "--config", cfg.string(), "--out",
                           (dir_ / "x").string()});
  EXPECT_EQ(r.code, kExitParseError);
  EXPECT_NE(r.err.find("$.policies[1]"), std::string::npos);
}

}  // namespace
}  // namespace tokenbudget
