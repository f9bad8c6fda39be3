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

// Dataset evaluation: joins predictions to scenes, runs the selected metric
// groups per focal agent and assembles a MetricReport.

#ifndef MPEVAL_EVALUATE_H_
#define MPEVAL_EVALUATE_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "mpeval/accuracy_metrics.h"
#include "mpeval/quality_metrics.h"
#include "mpeval/report.h"
#include "mpeval/scene.h"

namespace mpeval {

struct EvalConfig {
  std::string preset = "argoverse";
  int k = 6;
  // Additional cutoffs; their accuracy metrics get a "_<k>" suffix.
  std::vector<int> extra_k;
  MissCriterion miss;
  // Metric keys or group names; empty selects everything.
  std::vector<std::string> metrics;
  double dao_resolution = 0.5;
  double scr_iou_threshold = 0.05;
  // Substitute kDefaultVehicleDims for agents without dims.
  bool default_dims = true;
  OncomingConfig oncoming;
  LateralConfig lateral;
  std::optional<double> kde_bandwidth;
  BucketThresholds buckets;
  ApInterpolation ap_interpolation = ApInterpolation::kAllPoint;
  std::string headline = "brier_minFDE";
  std::uint64_t seed = 0;
  int jobs = 1;
};

// "argoverse": k=6, endpoint misses, brier_minFDE headline.
// "nuscenes": k=5 plus 10, max-pointwise misses, minADE headline.
absl::StatusOr<EvalConfig> PresetConfig(absl::string_view name);

absl::Status ValidateEvalConfig(const EvalConfig& config);
nlohmann::json EvalConfigToJson(const EvalConfig& config);
absl::StatusOr<EvalConfig> EvalConfigFromJson(const nlohmann::json& json);

// Metric group -> keys it produces, before any extra-k suffixes.
const std::map<std::string, std::vector<std::string>>& MetricGroups();

// Expands group names, checks unknown keys and adds suffixed keys for each
// extra cutoff. Empty selection means all keys.
absl::StatusOr<std::set<std::string>> ResolveMetricSelection(
    const EvalConfig& config);

// Keeps the top-k modes (by probability when present, else the first k) and
// renormalizes the probabilities. Goal scores follow their modes.
absl::StatusOr<PredictionSet> SelectTopK(const PredictionSet& prediction, int k);

struct ExperimentResult {
  std::string experiment;
  // One record per scene, sorted by scene id.
  std::vector<SceneRecord> records;
  std::map<std::string, double> dataset_metrics;
  std::map<std::string, std::string> dataset_failures;
};

// Fails on validation problems that make the join meaningless: duplicate
// scene ids, duplicate predictions, or predictions that reference unknown
// scenes or agents (DanglingReference). A missing focal prediction is not an
// error; the record carries a "prediction" failure instead.
absl::StatusOr<ExperimentResult> EvaluateExperiment(
    std::span<const Scene> scenes, std::span<const PredictionSet> predictions,
    const EvalConfig& config, absl::string_view experiment = "default");

MetricReport BuildReport(const EvalConfig& config,
                         const std::map<std::string, std::string>& input_digests,
                         const std::vector<ExperimentResult>& experiments);

bool HasFailures(const MetricReport& report);

// Process exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPartial = 3;

}  // namespace mpeval

#endif  // MPEVAL_EVALUATE_H_
