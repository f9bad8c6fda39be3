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

#include "mpeval/evaluate.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "gtest/gtest.h"
#include "mpeval/report.h"
#include "mpeval/status.h"
#include "tests/fixtures.h"

namespace mpeval {
namespace {

std::vector<Scene> Scenes(int n) {
  std::vector<Scene> scenes;
  for (int i = 0; i < n; ++i) scenes.push_back(fixtures::TwoWayRoad(absl::StrCat("road-", i)));
  return scenes;
}

std::vector<PredictionSet> Perfect(const std::vector<Scene>& scenes, int modes) {
  std::vector<PredictionSet> out;
  for (const Scene& s : scenes) out.push_back(fixtures::PerfectPrediction(s, modes));
  return out;
}

// Focal prediction whose final displacements are `offsets`, each mode being
// the ground truth shifted sideways.
PredictionSet ShiftedModes(const Scene& scene, const std::vector<double>& offsets) {
  PredictionSet p = fixtures::PerfectPrediction(scene, static_cast<int>(offsets.size()));
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    for (Vec2& v : p.modes[k]) v.y() += offsets[k];
  }
  return p;
}

TEST(EvaluateTest, PerfectPredictions) {
  const std::vector<Scene> scenes = Scenes(3);
  const ExperimentResult result = *EvaluateExperiment(scenes, Perfect(scenes, 6), EvalConfig{});
  ASSERT_EQ(result.records.size(), 3u);
  for (const SceneRecord& r : result.records) {
    EXPECT_TRUE(r.failures.empty()) << r.failures.begin()->second;
    EXPECT_EQ(r.metrics.at("minADE"), 0.0);
    EXPECT_EQ(r.metrics.at("minFDE"), 0.0);
    EXPECT_EQ(r.metrics.at("MR"), 0.0);
    EXPECT_EQ(r.metrics.at("DAC"), 1.0);
    EXPECT_EQ(r.metrics.at("OTD"), 0.0);
    EXPECT_EQ(r.metrics.at("RF"), 1.0);
    EXPECT_EQ(r.annotations.at("bucket"), "straight");
  }
  // Six identical hits: the first is a true positive, the rest duplicates.
  EXPECT_NEAR(result.dataset_metrics.at("mAP"), 1.0 / 6.0, 1e-12);
}

TEST(EvaluateTest, SpreadRatioFixture) {
  // One mode at the reference minFDE; five more whose mean brings the
  // average FDE to the reference value.
  const double min_fde = 1.078;
  const double avg_fde = 5.447;
  const double other = (6 * avg_fde - min_fde) / 5;
  const std::vector<Scene> scenes = Scenes(1);
  const std::vector<PredictionSet> preds = {
      ShiftedModes(scenes[0], {min_fde, other, other, other, other, other})};
  EvalConfig config;
  config.metrics = {"accuracy", "spread"};
  const ExperimentResult result = *EvaluateExperiment(scenes, preds, config);
  const SceneRecord& r = result.records[0];
  EXPECT_NEAR(r.metrics.at("minFDE"), min_fde, 1e-12);
  EXPECT_NEAR(r.metrics.at("avgFDE"), avg_fde, 1e-12);
  EXPECT_NEAR(r.metrics.at("RF"), 5.053, 1e-3);
  EXPECT_FALSE(r.metrics.contains("DAC"));
}

TEST(EvaluateTest, MissingPredictionIsPartialFailure) {
  const std::vector<Scene> scenes = Scenes(2);
  std::vector<PredictionSet> preds = Perfect(scenes, 6);
  preds.pop_back();
  const ExperimentResult result = *EvaluateExperiment(scenes, preds, EvalConfig{});
  ASSERT_EQ(result.records.size(), 2u);
  EXPECT_TRUE(result.records[0].failures.empty());
  EXPECT_TRUE(result.records[1].failures.contains("prediction"));
  const MetricReport report = BuildReport(EvalConfig{}, {}, {result});
  EXPECT_TRUE(HasFailures(report));
  EXPECT_EQ(report.summaries[0].failed_records, 1);
  EXPECT_EQ(report.summaries[0].metrics.at("minADE").excluded, 1);
}

TEST(EvaluateTest, DanglingReferences) {
  const std::vector<Scene> scenes = Scenes(1);
  std::vector<PredictionSet> preds = Perfect(scenes, 6);
  preds[0].scene_id = "elsewhere";
  EXPECT_EQ(GetErrorKind(EvaluateExperiment(scenes, preds, EvalConfig{}).status()),
            ErrorKind::kDanglingReference);
  preds = Perfect(scenes, 6);
  preds[0].agent_id = "nobody";
  EXPECT_EQ(GetErrorKind(EvaluateExperiment(scenes, preds, EvalConfig{}).status()),
            ErrorKind::kDanglingReference);
  preds = Perfect(scenes, 6);
  preds.push_back(preds[0]);
  EXPECT_FALSE(EvaluateExperiment(scenes, preds, EvalConfig{}).ok());
}

TEST(EvaluateTest, FewerModesThanK) {
  const std::vector<Scene> scenes = Scenes(1);
  const ExperimentResult result = *EvaluateExperiment(scenes, Perfect(scenes, 3), EvalConfig{});
  const SceneRecord& r = result.records[0];
  EXPECT_EQ(r.flags, std::vector<std::string>{"fewer_modes_than_k"});
  EXPECT_EQ(r.metrics.at("minADE"), 0.0);
}

TEST(EvaluateTest, WrongHorizonFailsRecord) {
  const std::vector<Scene> scenes = Scenes(1);
  std::vector<PredictionSet> preds = Perfect(scenes, 2);
  for (Polyline& mode : preds[0].modes) mode.pop_back();
  const ExperimentResult result = *EvaluateExperiment(scenes, preds, EvalConfig{});
  EXPECT_TRUE(result.records[0].failures.contains("prediction"));
}

TEST(EvaluateTest, NoLanesFailsOnlyLaneGroups) {
  std::vector<Scene> scenes = Scenes(2);
  scenes[1].lanes.clear();
  const ExperimentResult result = *EvaluateExperiment(scenes, Perfect(scenes, 6), EvalConfig{});
  const SceneRecord& r = result.records[1];
  EXPECT_TRUE(r.failures.contains("lateral"));
  EXPECT_TRUE(r.metrics.contains("minADE"));
  const MetricReport report = BuildReport(EvalConfig{}, {}, {result});
  EXPECT_EQ(report.summaries[0].metrics.at("lanes_reached").excluded, 1);
  EXPECT_EQ(report.summaries[0].metrics.at("lanes_reached").count, 1);
}

TEST(EvaluateTest, ExtraCutoffsAreSuffixed) {
  const std::vector<Scene> scenes = Scenes(1);
  EvalConfig config = *PresetConfig("nuscenes");
  const ExperimentResult result = *EvaluateExperiment(scenes, Perfect(scenes, 12), config);
  EXPECT_TRUE(result.records[0].metrics.contains("minADE"));
  EXPECT_TRUE(result.records[0].metrics.contains("minADE_10"));
  EXPECT_TRUE(result.records[0].metrics.contains("MR_10"));
}

TEST(EvaluateTest, JobsDoNotChangeTheReport) {
  std::mt19937_64 rng(5);
  std::vector<Scene> scenes;
  std::vector<PredictionSet> preds;
  for (int i = 0; i < 24; ++i) {
    fixtures::ClusterFixture f = fixtures::RandomClusterFixture(rng, i);
    scenes.push_back(f.scene);
    preds.push_back(f.prediction);
  }
  EvalConfig one;
  EvalConfig many;
  many.jobs = 4;
  const std::string a =
      WriteReportJson(BuildReport(one, {}, {*EvaluateExperiment(scenes, preds, one)}));
  const std::string b =
      WriteReportJson(BuildReport(one, {}, {*EvaluateExperiment(scenes, preds, many)}));
  EXPECT_EQ(a, b);
}

TEST(EvalConfigTest, Presets) {
  const EvalConfig argo = *PresetConfig("argoverse");
  EXPECT_EQ(argo.k, 6);
  EXPECT_EQ(argo.miss.definition, MissDefinition::kEndpoint);
  EXPECT_EQ(argo.headline, "brier_minFDE");
  const EvalConfig nus = *PresetConfig("nuscenes");
  EXPECT_EQ(nus.k, 5);
  EXPECT_EQ(nus.extra_k, std::vector<int>{10});
  EXPECT_EQ(nus.miss.definition, MissDefinition::kMaxPointwise);
  EXPECT_EQ(nus.headline, "minADE");
  EXPECT_EQ(GetErrorKind(PresetConfig("waymo").status()), ErrorKind::kInvalidConfig);
}

TEST(EvalConfigTest, EchoRoundTripReproducesReport) {
  EvalConfig config = *PresetConfig("nuscenes");
  config.miss.threshold = 1.5;
  config.kde_bandwidth = 0.7;
  config.metrics = {"accuracy", "nll", "OTD"};
  config.seed = 99;
  const nlohmann::json echo = EvalConfigToJson(config);
  const absl::StatusOr<EvalConfig> back = EvalConfigFromJson(echo);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(EvalConfigToJson(*back), echo);

  const std::vector<Scene> scenes = Scenes(2);
  const std::vector<PredictionSet> preds = {ShiftedModes(scenes[0], {0.5, 1, 2, 3, 4, 5}),
                                            ShiftedModes(scenes[1], {3, 1, 2})};
  const std::string first =
      WriteReportJson(BuildReport(config, {}, {*EvaluateExperiment(scenes, preds, config)}));
  const std::string second =
      WriteReportJson(BuildReport(*back, {}, {*EvaluateExperiment(scenes, preds, *back)}));
  EXPECT_EQ(first, second);
}

TEST(EvalConfigTest, Validation) {
  EvalConfig config;
  config.metrics = {"bogus"};
  EXPECT_EQ(GetErrorKind(ValidateEvalConfig(config)), ErrorKind::kInvalidConfig);
  config = EvalConfig{};
  config.k = 0;
  EXPECT_FALSE(ValidateEvalConfig(config).ok());
  config = EvalConfig{};
  config.extra_k = {6};
  EXPECT_FALSE(ValidateEvalConfig(config).ok());
  EXPECT_FALSE(EvalConfigFromJson(nlohmann::json{{"surprise", 1}}).ok());
  EXPECT_FALSE(EvalConfigFromJson(nlohmann::json{{"k", "six"}}).ok());
}

TEST(MetricSelectionTest, GroupsAndKeys) {
  EvalConfig config;
  config.metrics = {"drivable", "RF"};
  const std::set<std::string> selected = *ResolveMetricSelection(config);
  EXPECT_EQ(selected, (std::set<std::string>{"off_road_rate", "DAC", "DAO", "RF"}));
  config.metrics = {"all"};
  EXPECT_GT(ResolveMetricSelection(config)->size(), 20u);
}

TEST(SelectTopKTest, ScoresFollowModes) {
  PredictionSet p = fixtures::PerfectPrediction(fixtures::TwoWayRoad(), 3);
  p.probabilities = std::vector<double>{0.2, 0.5, 0.3};
  p.goal_scores = std::vector<double>{1, 2, 3};
  const PredictionSet top = *SelectTopK(p, 2);
  EXPECT_EQ(*top.goal_scores, (std::vector<double>{2, 3}));
  EXPECT_NEAR((*top.probabilities)[0], 0.625, 1e-12);
}

}  // namespace
}  // namespace mpeval
