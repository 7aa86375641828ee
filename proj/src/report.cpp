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

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>

#include "tokenbudget/error.h"

namespace tokenbudget {
namespace {

using nlohmann::json;

constexpr int kChartWidth = 640;
constexpr int kChartHeight = 320;
constexpr int kMargin = 40;

std::int64_t histogram_total(const Histogram& h) {
  return std::accumulate(h.counts.begin(), h.counts.end(), std::int64_t{0});
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out;
  out.exceptions(std::ofstream::failbit | std::ofstream::badbit);
  out.open(path, std::ios::binary | std::ios::trunc);
  out << body;
}

std::string svg_open(std::string_view title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" "
      "height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"20\" font-family=\"sans-serif\" "
      "font-size=\"14\">{3}</text>\n"
      "<line x1=\"{2}\" y1=\"{4}\" x2=\"{5}\" y2=\"{4}\" stroke=\"black\"/>\n"
      "<line x1=\"{2}\" y1=\"{2}\" x2=\"{2}\" y2=\"{4}\" stroke=\"black\"/>\n",
      kChartWidth, kChartHeight, kMargin, title, kChartHeight - kMargin,
      kChartWidth - kMargin);
}

json histogram_json(const Histogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}};
}

template <typename T>
T field(const json& obj, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                fmt::format("report field '{}': {}", key, e.what()));
  }
}

}  // namespace

std::string accuracy_csv(const RunReport& report) {
  std::string out =
      "policy,trials,correct,accuracy,mean_tokens,full_coverage_trials,"
      "mean_segments_present,no_evidence\n";
  for (const PolicyResult& r : report.policies) {
    out += fmt::format("{},{},{},{:.6f},{:.4f},{},{:.4f},{}\n", r.policy,
                       r.trials, r.correct, r.accuracy, r.mean_tokens,
                       r.full_coverage_trials, r.mean_segments_present,
                       r.no_evidence);
  }
  return out;
}

std::string histogram_csv(const RunReport& report) {
  std::string out = "bin_lo,bin_hi,count,percentage\n";
  const Histogram& h = report.histogram;
  const std::int64_t total = histogram_total(h);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double pct = total == 0 ? 0.0 : 100.0 * h.counts[b] / total;
    out += fmt::format("{:.4f},{:.4f},{},{:.4f}\n", h.edges[b], h.edges[b + 1],
                       h.counts[b], pct);
  }
  return out;
}

std::string utilization_csv(const RunReport& report) {
  std::string out =
      "episode,segments,frames,tokens,capacity,utilization,tokens_per_frame,"
      "stage\n";
  for (const EpisodeUtilization& u : report.utilization) {
    const double util =
        u.capacity == 0 ? 0.0 : static_cast<double>(u.tokens) / u.capacity;
    const double rate =
        u.frames == 0 ? 0.0 : static_cast<double>(u.tokens) / u.frames;
    out += fmt::format("{},{},{},{},{},{:.6f},{:.6f},{}\n", u.episode,
                       u.segments, u.frames, u.tokens, u.capacity, util, rate,
                       stage_name(u.stage));
  }
  return out;
}

std::string summary_csv(const RunReport& report) {
  std::string out = "metric,value\n";
  out += fmt::format("trials,{}\n", report.trials);
  out += fmt::format("segments_scored,{}\n", report.segments_scored);
  out += fmt::format("residual_stage_fraction,{:.6f}\n",
                     report.residual_stage_fraction);
  out += fmt::format("mean_of_episode_tokens_per_frame,{:.6f}\n",
                     report.mean_tokens_per_frame);
  out += fmt::format("pooled_tokens_per_frame,{:.6f}\n",
                     report.pooled_tokens_per_frame);
  out += fmt::format("tokens_per_frame_bound,{:.6f}\n",
                     report.tokens_per_frame_bound);
  out += fmt::format("avg_capacity_per_segment,{:.6f}\n",
                     report.avg_capacity_per_segment);
  out += fmt::format("min_tokens_per_frame,{:.6f}\n",
                     report.min_tokens_per_frame);
  out += fmt::format("max_tokens_per_frame,{:.6f}\n",
                     report.max_tokens_per_frame);
  return out;
}

std::string histogram_svg(const RunReport& report) {
  const Histogram& h = report.histogram;
  std::string out = svg_open("Allocated tokens per segment");
  const std::int64_t peak =
      h.counts.empty() ? 0 : *std::max_element(h.counts.begin(), h.counts.end());
  const double plot_w = kChartWidth - 2.0 * kMargin;
  const double plot_h = kChartHeight - 2.0 * kMargin;
  const double bar_w = h.counts.empty() ? 0.0 : plot_w / h.counts.size();
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double bar_h = peak == 0 ? 0.0 : plot_h * h.counts[b] / peak;
    out += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
        "fill=\"steelblue\"><title>[{:.2f}, {:.2f}): {}</title></rect>\n",
        kMargin + b * bar_w + 1.0, kChartHeight - kMargin - bar_h,
        std::max(bar_w - 2.0, 0.0), bar_h, h.edges[b], h.edges[b + 1],
        h.counts[b]);
  }
  out += "</svg>\n";
  return out;
}

std::string utilization_svg(const RunReport& report) {
  std::string out = svg_open("Budget utilization per episode");
  const double plot_w = kChartWidth - 2.0 * kMargin;
  const double plot_h = kChartHeight - 2.0 * kMargin;
  int y_max = 1;
  for (const EpisodeUtilization& u : report.utilization) {
    y_max = std::max({y_max, u.capacity, u.tokens});
  }
  const std::size_t n = report.utilization.size();
  for (std::size_t i = 0; i < n; ++i) {
    const EpisodeUtilization& u = report.utilization[i];
    const double x = kMargin + (n == 1 ? plot_w / 2 : plot_w * i / (n - 1));
    const double y = kChartHeight - kMargin - plot_h * u.tokens / y_max;
    const double cap = kChartHeight - kMargin - plot_h * u.capacity / y_max;
    out += fmt::format(
        "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"darkorange\"/>\n"
        "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1\" fill=\"seagreen\"/>\n",
        x, y, x, cap);
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::filesystem::path> emit_report(
    const RunReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::pair<std::string_view, std::string> files[] = {
      {kAccuracyTable, accuracy_csv(report)},
      {kHistogramTable, histogram_csv(report)},
      {kUtilizationTable, utilization_csv(report)},
      {kSummaryTable, summary_csv(report)},
      {kHistogramChart, histogram_svg(report)},
      {kUtilizationChart, utilization_svg(report)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, body] : files) {
    const auto path = out_dir / name;
    write_file(path, body);
    written.push_back(path);
  }
  return written;
}

std::string summary_table(const RunReport& report) {
  std::string out = fmt::format("{:<20} {:>9} {:>12} {:>10}\n", "policy",
                                "accuracy", "mean_tokens", "coverage");
  for (const PolicyResult& r : report.policies) {
    const double coverage =
        r.trials == 0 ? 0.0 : static_cast<double>(r.full_coverage_trials) / r.trials;
    out += fmt::format("{:<20} {:>9.4f} {:>12.2f} {:>10.4f}\n", r.policy,
                       r.accuracy, r.mean_tokens, coverage);
  }
  out += fmt::format(
      "trials={} stage2_fraction={:.4f} tokens/frame={:.4f} (bound {:.4f})\n",
      report.trials, report.residual_stage_fraction,
      report.pooled_tokens_per_frame, report.tokens_per_frame_bound);
  return out;
}

std::string report_to_json(const RunReport& report) {
  json policies = json::array();
  for (const PolicyResult& r : report.policies) {
    policies.push_back({{"policy", r.policy},
                        {"trials", r.trials},
                        {"correct", r.correct},
                        {"accuracy", r.accuracy},
                        {"mean_tokens", r.mean_tokens},
                        {"full_coverage_trials", r.full_coverage_trials},
                        {"mean_segments_present", r.mean_segments_present},
                        {"no_evidence", r.no_evidence}});
  }
  json utilization = json::array();
  for (const EpisodeUtilization& u : report.utilization) {
    utilization.push_back({{"episode", u.episode},
                           {"segments", u.segments},
                           {"frames", u.frames},
                           {"tokens", u.tokens},
                           {"capacity", u.capacity},
                           {"stage", stage_name(u.stage)}});
  }
  json doc;
  doc["policies"] = std::move(policies);
  doc["histogram"] = histogram_json(report.histogram);
  doc["utilization"] = std::move(utilization);
  doc["trials"] = report.trials;
  doc["segments_scored"] = report.segments_scored;
  doc["residual_stage_fraction"] = report.residual_stage_fraction;
  doc["mean_tokens_per_frame"] = report.mean_tokens_per_frame;
  doc["pooled_tokens_per_frame"] = report.pooled_tokens_per_frame;
  doc["tokens_per_frame_bound"] = report.tokens_per_frame_bound;
  doc["avg_capacity_per_segment"] = report.avg_capacity_per_segment;
  doc["min_tokens_per_frame"] = report.min_tokens_per_frame;
  doc["max_tokens_per_frame"] = report.max_tokens_per_frame;
  return doc.dump(2) + "\n";
}

RunReport report_from_json(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), e.byte);
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "report must be a JSON object");
  }
  RunReport report;
  for (const json& p : field<json>(doc, "policies")) {
    PolicyResult r;
    r.policy = field<std::string>(p, "policy");
    r.trials = field<int>(p, "trials");
    r.correct = field<int>(p, "correct");
    r.accuracy = field<double>(p, "accuracy");
    r.mean_tokens = field<double>(p, "mean_tokens");
    r.full_coverage_trials = field<int>(p, "full_coverage_trials");
    r.mean_segments_present = field<double>(p, "mean_segments_present");
    r.no_evidence = field<int>(p, "no_evidence");
    report.policies.push_back(std::move(r));
  }
  const json hist = field<json>(doc, "histogram");
  report.histogram.edges = field<std::vector<double>>(hist, "edges");
  report.histogram.counts = field<std::vector<std::int64_t>>(hist, "counts");
  if (!report.histogram.counts.empty() &&
      report.histogram.edges.size() != report.histogram.counts.size() + 1) {
    throw Error(ErrorCode::kParseError, "histogram edges/counts disagree");
  }
  for (const json& u : field<json>(doc, "utilization")) {
    EpisodeUtilization e;
    e.episode = field<int>(u, "episode");
    e.segments = field<int>(u, "segments");
    e.frames = field<int>(u, "frames");
    e.tokens = field<int>(u, "tokens");
    e.capacity = field<int>(u, "capacity");
    const auto stage = parse_stage(field<std::string>(u, "stage"));
    if (!stage) throw Error(ErrorCode::kParseError, "unknown stage in report");
    e.stage = *stage;
    report.utilization.push_back(e);
  }
  report.trials = field<int>(doc, "trials");
  report.segments_scored = field<std::int64_t>(doc, "segments_scored");
  report.residual_stage_fraction = field<double>(doc, "residual_stage_fraction");
  report.mean_tokens_per_frame = field<double>(doc, "mean_tokens_per_frame");
  report.pooled_tokens_per_frame = field<double>(doc, "pooled_tokens_per_frame");
  report.tokens_per_frame_bound = field<double>(doc, "tokens_per_frame_bound");
  report.avg_capacity_per_segment =
      field<double>(doc, "avg_capacity_per_segment");
  report.min_tokens_per_frame = field<double>(doc, "min_tokens_per_frame");
  report.max_tokens_per_frame = field<double>(doc, "max_tokens_per_frame");
  return report;
}

}  // namespace tokenbudget
