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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tokenbudget/ablation.h"

namespace tokenbudget {

// File names written by emit_report, in write order.
inline constexpr std::string_view kAccuracyTable = "accuracy.csv";
inline constexpr std::string_view kHistogramTable = "histogram.csv";
inline constexpr std::string_view kUtilizationTable = "utilization.csv";
inline constexpr std::string_view kSummaryTable = "summary.csv";
inline constexpr std::string_view kHistogramChart = "histogram.svg";
inline constexpr std::string_view kUtilizationChart = "utilization.svg";

// Writes the CSV tables and SVG charts into out_dir (created if missing)
// and returns the paths written. Output bytes depend only on the report.
// Filesystem failures surface as std::filesystem::filesystem_error or
// std::ios_base::failure.
std::vector<std::filesystem::path> emit_report(
    const RunReport& report, const std::filesystem::path& out_dir);

std::string accuracy_csv(const RunReport& report);
std::string histogram_csv(const RunReport& report);
std::string utilization_csv(const RunReport& report);
std::string summary_csv(const RunReport& report);
std::string histogram_svg(const RunReport& report);
std::string utilization_svg(const RunReport& report);

// Fixed-width table for terminal output.
std::string summary_table(const RunReport& report);

// Lossless JSON form of a report, so charts can be re-rendered later.
std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view document);

}  // namespace tokenbudget
