// Copyright 2026 The mpeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Metric reports: per-agent records, per-experiment aggregates, and their
// canonical JSON and CSV encodings.

#ifndef MPEVAL_REPORT_H_
#define MPEVAL_REPORT_H_

#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace mpeval {

inline constexpr char kToolkitVersion[] = "1.0.0";

struct SceneRecord {
  std::string scene_id;
  std::string agent_id;
  std::string experiment;
  // May hold non-finite values (e.g. an unbounded spread ratio).
  std::map<std::string, double> metrics;
  // Metric group -> error message for groups that could not be computed.
  std::map<std::string, std::string> failures;
  std::vector<std::string> flags;
  std::map<std::string, std::string> annotations;

  bool operator==(const SceneRecord&) const = default;
};

struct MetricAggregate {
  double mean = 0.0;
  int count = 0;
  // Records of the experiment without a finite value for the metric.
  int excluded = 0;

  bool operator==(const MetricAggregate&) const = default;
};

struct ExperimentSummary {
  std::string experiment;
  int records = 0;
  int failed_records = 0;
  std::map<std::string, MetricAggregate> metrics;
  // Metrics defined over the whole dataset rather than averaged per record.
  std::map<std::string, double> dataset_metrics;
  std::map<std::string, int> flag_counts;

  bool operator==(const ExperimentSummary&) const = default;
};

struct MetricReport {
  nlohmann::json config = nlohmann::json::object();
  std::string version = kToolkitVersion;
  std::map<std::string, std::string> input_digests;
  std::vector<SceneRecord> records;
  std::vector<ExperimentSummary> summaries;

  bool operator==(const MetricReport&) const = default;
};

// Per-experiment means over finite values, experiments in name order.
// Dataset metrics are left empty for the caller to fill.
std::vector<ExperimentSummary> Aggregate(const std::vector<SceneRecord>& records);

// Rounds to 6 significant digits, the precision used in every encoding.
double RoundSignificant(double value);

std::string WriteReportJson(const MetricReport& report);
std::string WriteReportCsv(const MetricReport& report);
absl::StatusOr<MetricReport> ParseReportJson(absl::string_view text);

// Markdown table with one row per (report, experiment) and one column per
// metric; rows keep input order. Empty `metrics` selects every aggregated
// metric in name order.
std::string ComparisonTable(const std::vector<MetricReport>& reports,
                            const std::vector<std::string>& metrics);

}  // namespace mpeval

#endif  // MPEVAL_REPORT_H_
