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

#include "tokenbudget/report.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tokenbudget/error.h"

namespace tokenbudget {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

RunReport small_report() {
  AblationConfig cfg;
  cfg.trials = 12;
  cfg.episode.n_segments = 8;
  cfg.pipeline.f_max = 64;
  cfg.scorer.noise_sigma = 0.4;
  return run_ablation(cfg);
}

TEST(ReportTest, EmptyReportGivesHeaderOnlyTables) {
  const RunReport empty;
  EXPECT_EQ(line_count(accuracy_csv(empty)), 1);
  EXPECT_EQ(line_count(histogram_csv(empty)), 1);
  EXPECT_EQ(line_count(utilization_csv(empty)), 1);
  EXPECT_NO_THROW(histogram_svg(empty));
  EXPECT_NO_THROW(utilization_svg(empty));
}

TEST(ReportTest, EmptyPolicyListGivesHeaderOnlyAccuracy) {
  AblationConfig cfg;
  cfg.trials = 3;
  cfg.policies.clear();
  const RunReport r = run_ablation(cfg);
  EXPECT_EQ(accuracy_csv(r),
            "policy,trials,correct,accuracy,mean_tokens,full_coverage_trials,"
            "mean_segments_present,no_evidence\n");
  EXPECT_EQ(line_count(utilization_csv(r)), 4);
}

TEST(ReportTest, HistogramPercentagesSumToHundred) {
  const std::string csv = histogram_csv(small_report());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double sum = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    sum += std::stod(line.substr(line.rfind(',') + 1));
    ++rows;
  }
  EXPECT_EQ(rows, 16);
  EXPECT_NEAR(sum, 100.0, 0.01);
}

TEST(ReportTest, EmitWritesEveryFileAndIsByteStable) {
  const RunReport r = small_report();
  const auto base = std::filesystem::temp_directory_path() /
                    "tokenbudget_report_test";
  const auto a = base / "report_a";
  const auto b = base / "report_b";
  std::filesystem::remove_all(base);
  const auto written_a = emit_report(r, a);
  const auto written_b = emit_report(small_report(), b);
  ASSERT_EQ(written_a.size(), 6u);
  for (std::size_t i = 0; i < written_a.size(); ++i) {
    EXPECT_TRUE(std::filesystem::exists(written_a[i]));
    EXPECT_EQ(slurp(written_a[i]), slurp(written_b[i]))
        << written_a[i].filename();
  }
  EXPECT_EQ(written_a[0].filename(), kAccuracyTable);
  std::filesystem::remove_all(base);
}

TEST(ReportTest, JsonRoundTripIsLossless) {
  const RunReport r = small_report();
  const std::string doc = report_to_json(r);
  const RunReport back = report_from_json(doc);
  EXPECT_EQ(back, r);
  EXPECT_EQ(report_to_json(back), doc);
}

TEST(ReportTest, JsonRejectsGarbage) {
  EXPECT_THROW(report_from_json("{"), Error);
  EXPECT_THROW(report_from_json("{\"trials\": 1}"), Error);
}

TEST(ReportTest, SummaryTableListsPolicies) {
  const RunReport r = small_report();
  const std::string table = summary_table(r);
  for (const PolicyResult& p : r.policies) {
    EXPECT_NE(table.find(p.policy), std::string::npos);
  }
  EXPECT_NE(summary_csv(r).find("tokens_per_frame_bound,"), std::string::npos);
}

}  // namespace
}  // namespace tokenbudget
