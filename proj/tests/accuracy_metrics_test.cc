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

#include "mpeval/accuracy_metrics.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "mpeval/geometry.h"
#include "mpeval/status.h"
#include "tests/fixtures.h"
#include "tests/oracles.h"

namespace mpeval {
namespace {

PredictionSet Modes(std::vector<Polyline> modes,
                    std::optional<std::vector<double>> probabilities = std::nullopt) {
  PredictionSet p;
  p.scene_id = "s";
  p.agent_id = "a";
  p.modes = std::move(modes);
  p.probabilities = std::move(probabilities);
  return p;
}

const Polyline kGt = {{0, 0}, {1, 0}, {2, 0}};

TEST(NormalizeTopKTest, Examples) {
  const absl::StatusOr<TopK> top = NormalizeTopK(std::vector<double>{0.5, 0.3, 0.2}, 3, 2);
  ASSERT_TRUE(top.ok());
  EXPECT_EQ(top->modes, (std::vector<int>{0, 1}));
  EXPECT_NEAR(top->probabilities[0], 0.5 / 0.8, 1e-15);
  EXPECT_NEAR(top->probabilities[1], 0.3 / 0.8, 1e-15);
  EXPECT_NEAR(top->probabilities[0], 0.625, 1e-12);

  const absl::StatusOr<TopK> uniform = NormalizeTopK(std::nullopt, 5, 3);
  ASSERT_TRUE(uniform.ok());
  EXPECT_EQ(uniform->modes, (std::vector<int>{0, 1, 2}));
  for (double p : uniform->probabilities) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);

  const absl::StatusOr<TopK> one = NormalizeTopK(std::vector<double>{1, 0, 0}, 3, 1);
  EXPECT_EQ(one->probabilities, std::vector<double>{1.0});
}

TEST(NormalizeTopKTest, TiesPreferLowerIndex) {
  const absl::StatusOr<TopK> top = NormalizeTopK(std::vector<double>{0.2, 0.4, 0.4}, 3, 2);
  EXPECT_EQ(top->modes, (std::vector<int>{1, 2}));
}

TEST(NormalizeTopKTest, Errors) {
  EXPECT_EQ(GetErrorKind(NormalizeTopK(std::vector<double>{0, 0}, 2, 1).status()),
            ErrorKind::kAllZeroProbabilities);
  EXPECT_EQ(GetErrorKind(NormalizeTopK(std::nullopt, 2, 3).status()),
            ErrorKind::kInvalidConfig);
}

TEST(DisplacementErrorsTest, BestAdeAndBestFdeDiffer) {
  const PredictionSet p = Modes({{{0, 1}, {1, 1}, {2, 1}}, {{0, 0}, {1, 0}, {2, 2}}});
  const double ade_a = oracle::Ade(p.modes[0], kGt);
  const double ade_b = oracle::Ade(p.modes[1], kGt);
  EXPECT_NEAR(ade_a, 1.0, 1e-12);
  EXPECT_NEAR(ade_b, 0.6667, 1e-4);
  const absl::StatusOr<AccuracyResult> r = DisplacementErrors(p, kGt, 2);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_NEAR(r->min_ade, ade_b, 1e-12);
  EXPECT_NEAR(r->min_fde, 1.0, 1e-12);
  EXPECT_NEAR(r->avg_fde, 1.5, 1e-12);
  EXPECT_EQ(r->best_ade_mode, 1);
  EXPECT_EQ(r->best_fde_mode, 0);
}

TEST(DisplacementErrorsTest, PerfectPrediction) {
  const absl::StatusOr<AccuracyResult> r = DisplacementErrors(Modes({kGt}), kGt, 1);
  EXPECT_EQ(r->min_ade, 0.0);
  EXPECT_EQ(r->min_fde, 0.0);
  EXPECT_EQ(r->heading_error, 0.0);
  EXPECT_FALSE(r->miss);
}

TEST(DisplacementErrorsTest, ThreeFourFive) {
  const absl::StatusOr<AccuracyResult> r =
      DisplacementErrors(Modes({{{1, 1}, {3, 4}}}), Polyline{{0, 1}, {0, 0}}, 1);
  EXPECT_DOUBLE_EQ(r->min_fde, 5.0);
}

TEST(DisplacementErrorsTest, LengthMismatch) {
  EXPECT_EQ(GetErrorKind(DisplacementErrors(Modes({{{0, 0}}}), kGt, 1).status()),
            ErrorKind::kLengthMismatch);
}

TEST(DisplacementErrorsTest, HeadingErrorWrapped) {
  const absl::StatusOr<AccuracyResult> r =
      DisplacementErrors(Modes({{{0, 0}, {0, 1}, {0, 2}}}), kGt, 1);
  EXPECT_NEAR(r->heading_error, kPi / 2, 1e-12);
}

TEST(MissTest, DefinitionsDiverge) {
  const PredictionSet p = Modes({{{0, 3}, {1, 3}, {2, 0}}});
  EXPECT_EQ(oracle::Fde(p.modes[0], kGt), 0.0);
  EXPECT_EQ(oracle::MaxErr(p.modes[0], kGt), 3.0);
  EXPECT_FALSE(*IsMiss(p, kGt, 1, {2.0, MissDefinition::kEndpoint}));
  EXPECT_TRUE(*IsMiss(p, kGt, 1, {2.0, MissDefinition::kMaxPointwise}));
}

TEST(MissTest, PerfectAndFarPredictions) {
  for (MissDefinition d : {MissDefinition::kEndpoint, MissDefinition::kMaxPointwise}) {
    EXPECT_FALSE(*IsMiss(Modes({kGt}), kGt, 1, {2.0, d}));
    EXPECT_TRUE(*IsMiss(Modes({{{0, 2.5}, {1, 2.5}, {2, 2.5}}, {{0, -3}, {1, -3}, {2, -3}}}),
                        kGt, 2, {2.0, d}));
  }
}

TEST(MissDefinitionTest, NamesRoundTrip) {
  for (MissDefinition d : {MissDefinition::kEndpoint, MissDefinition::kMaxPointwise}) {
    EXPECT_EQ(ParseMissDefinition(MissDefinitionName(d)), d);
  }
  EXPECT_FALSE(ParseMissDefinition("nearest").has_value());
}

TEST(ProbabilisticErrorsTest, HalfProbability) {
  // One mode with FDE 1 and probability 0.5 after normalization.
  const PredictionSet p = Modes({{{0, 1}, {1, 1}, {2, 1}}, {{0, 5}, {1, 5}, {2, 5}}},
                                std::vector<double>{0.5, 0.5});
  const absl::StatusOr<ProbabilisticResult> r = ProbabilisticErrors(p, kGt, 2);
  ASSERT_TRUE(r.ok());
  const double reference = 1.0 - std::log(0.5);
  EXPECT_NEAR(reference, 1.6931, 1e-4);
  EXPECT_NEAR(r->p_min_fde, reference, 1e-12);
  EXPECT_NEAR(r->brier_min_fde, 1.25, 1e-12);
  EXPECT_NEAR(r->p_miss, 0.5, 1e-12);
}

TEST(ProbabilisticErrorsTest, PenaltyClamps) {
  EXPECT_NEAR(ProbabilityPenalty(0.01), -std::log(0.05), 1e-15);
  EXPECT_GT(-std::log(0.01), -std::log(0.05));
  EXPECT_NEAR(kMaxProbabilityPenalty, 2.9957, 1e-4);
  EXPECT_EQ(ProbabilityPenalty(0.0), kMaxProbabilityPenalty);
  EXPECT_EQ(ProbabilityPenalty(1.0), 0.0);
}

TEST(ProbabilisticErrorsTest, PerfectCertainMode) {
  const absl::StatusOr<ProbabilisticResult> r =
      ProbabilisticErrors(Modes({kGt}, std::vector<double>{1.0}), kGt, 1);
  EXPECT_EQ(r->p_min_fde, 0.0);
  EXPECT_EQ(r->brier_min_fde, 0.0);
  EXPECT_EQ(r->p_miss, 0.0);
}

TEST(ProbabilisticErrorsTest, AdeVariantUsesBestAdeMode) {
  const PredictionSet p = Modes({{{0, 1}, {1, 1}, {2, 1}}, {{0, 0}, {1, 0}, {2, 2}}},
                                std::vector<double>{0.8, 0.2});
  const absl::StatusOr<ProbabilisticResult> r = ProbabilisticErrors(p, kGt, 2);
  EXPECT_NEAR(r->best_ade_probability, 0.2, 1e-12);
  EXPECT_NEAR(r->best_fde_probability, 0.8, 1e-12);
  EXPECT_NEAR(r->p_min_ade, 2.0 / 3.0 - std::log(0.2), 1e-12);
}

TEST(ProbabilisticErrorsTest, PropertiesOnFuzzedInstances) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const fixtures::MetricInstance inst = fixtures::RandomMetricInstance(rng);
    const absl::StatusOr<AccuracyResult> a = DisplacementErrors(inst.prediction, inst.gt, inst.k);
    const absl::StatusOr<ProbabilisticResult> p =
        ProbabilisticErrors(inst.prediction, inst.gt, inst.k);
    ASSERT_TRUE(a.ok() && p.ok());
    const double extra = p->p_min_fde - a->min_fde;
    EXPECT_GE(extra, -1e-12);
    EXPECT_LE(extra, kMaxProbabilityPenalty + 1e-12);
    EXPECT_GE(p->p_min_ade, a->min_ade - 1e-12);
    const double brier = p->brier_min_fde - a->min_fde;
    EXPECT_GE(brier, -1e-12);
    EXPECT_LE(brier, 1.0 + 1e-12);
    EXPECT_LE(a->min_fde, a->avg_fde + 1e-12);
  }
}

TEST(DisplacementErrorsTest, MinimaNonIncreasingInK) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    fixtures::MetricInstance inst = fixtures::RandomMetricInstance(rng);
    double prev_ade = 1e300;
    double prev_fde = 1e300;
    for (int k = 1; k <= inst.prediction.num_modes(); ++k) {
      const absl::StatusOr<AccuracyResult> r = DisplacementErrors(inst.prediction, inst.gt, k);
      EXPECT_LE(r->min_ade, prev_ade);
      EXPECT_LE(r->min_fde, prev_fde);
      prev_ade = r->min_ade;
      prev_fde = r->min_fde;
    }
  }
}

TEST(DisplacementErrorsTest, RigidTransformInvariant) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 300; ++trial) {
    fixtures::MetricInstance inst = fixtures::RandomMetricInstance(rng);
    const double theta = u(rng);
    const Vec2 shift(u(rng) * 20, u(rng) * 20);
    const auto move = [&](const Polyline& line) {
      Polyline out;
      for (const Vec2& p : line) out.push_back(fixtures::Rotate(p, theta) + shift);
      return out;
    };
    PredictionSet moved = inst.prediction;
    for (Polyline& mode : moved.modes) mode = move(mode);
    const Polyline gt = move(inst.gt);
    const AccuracyResult a = *DisplacementErrors(inst.prediction, inst.gt, inst.k);
    const AccuracyResult b = *DisplacementErrors(moved, gt, inst.k);
    EXPECT_NEAR(a.min_ade, b.min_ade, 1e-9);
    EXPECT_NEAR(a.min_fde, b.min_fde, 1e-9);
    EXPECT_NEAR(a.avg_fde, b.avg_fde, 1e-9);
  }
}

TEST(DisplacementErrorsTest, EndpointMissNeverExceedsMaxPointwiseMiss) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const fixtures::MetricInstance inst = fixtures::RandomMetricInstance(rng);
    const bool endpoint = *IsMiss(inst.prediction, inst.gt, inst.k, {2.0, MissDefinition::kEndpoint});
    const bool max_pointwise =
        *IsMiss(inst.prediction, inst.gt, inst.k, {2.0, MissDefinition::kMaxPointwise});
    EXPECT_LE(endpoint, max_pointwise);
  }
}

TEST(NllKdeTest, TwoSampleClosedForm) {
  const PredictionSet p = Modes({{{0, 0}}, {{2, 0}}});
  const Polyline gt = {{1, 0}};
  const double reference = oracle::MixtureNll({{0, 0}, {2, 0}}, {1, 0}, 1.0);
  EXPECT_NEAR(std::exp(-reference), 0.09653, 1e-5);
  EXPECT_NEAR(reference, 2.338, 1e-3);
  EXPECT_NEAR(*NllKde(p, gt, 1.0), reference, 1e-12);
}

TEST(NllKdeTest, AllSamplesAtGroundTruth) {
  const PredictionSet p = Modes({{{3, 4}}, {{3, 4}}, {{3, 4}}});
  for (double h : {0.1, 0.5, 2.0}) {
    EXPECT_NEAR(*NllKde(p, Polyline{{3, 4}}, h), std::log(2 * kPi * h * h), 1e-12);
  }
}

TEST(NllKdeTest, DensityFloor) {
  const PredictionSet p = Modes({{{0, 0}}});
  EXPECT_NEAR(*NllKde(p, Polyline{{1000, 0}}, 1.0), -std::log(1e-12), 1e-9);
  EXPECT_NEAR(-std::log(1e-12), 27.63, 1e-2);
}

TEST(NllKdeTest, ScottBandwidthFloorAndValue) {
  EXPECT_EQ(ScottBandwidth(std::vector<Vec2>{{0, 0}}), kMinKdeBandwidth);
  EXPECT_EQ(ScottBandwidth(std::vector<Vec2>{{1, 1}, {1, 1}}), kMinKdeBandwidth);
  // Sample variances 2 and 0 give sigma 1, times 2^(-1/6).
  EXPECT_NEAR(ScottBandwidth(std::vector<Vec2>{{0, 0}, {2, 0}}), std::pow(2.0, -1.0 / 6.0),
              1e-12);
}

TEST(NllKdeTest, WeightsFollowProbabilities) {
  const PredictionSet p = Modes({{{0, 0}}, {{50, 0}}}, std::vector<double>{3, 1});
  const double density = 0.75 / (2 * kPi);
  EXPECT_NEAR(*NllKde(p, Polyline{{0, 0}}, 1.0), -std::log(density), 1e-9);
}

TEST(SceneJointErrorsTest, SingleAgentReducesToMarginal) {
  const PredictionSet p = Modes({{{0, 1}, {1, 1}, {2, 1}}, {{0, 0}, {1, 0}, {2, 2}}});
  const PredictionSet* agents[] = {&p};
  const Polyline gts[] = {kGt};
  const SceneJointResult r = *SceneJointErrors(agents, gts, 2);
  const AccuracyResult m = *DisplacementErrors(p, kGt, 2);
  EXPECT_NEAR(r.scene_min_ade, m.min_ade, 1e-15);
  EXPECT_NEAR(r.scene_min_fde, m.min_fde, 1e-15);
}

TEST(SceneJointErrorsTest, JointIsWorseThanMarginals) {
  // Agent 1 is perfect in mode 0, agent 2 in mode 1; each is 1 m off otherwise.
  const Polyline off = {{0, 1}, {1, 1}, {2, 1}};
  const PredictionSet a = Modes({kGt, off});
  const PredictionSet b = Modes({off, kGt});
  const PredictionSet* agents[] = {&a, &b};
  const Polyline gts[] = {kGt, kGt};
  double reference = 1e300;
  for (int j = 0; j < 2; ++j) {
    reference = std::min(reference, 0.5 * (oracle::Ade(a.modes[j], kGt) +
                                            oracle::Ade(b.modes[j], kGt)));
  }
  EXPECT_NEAR(reference, 0.5, 1e-15);
  const SceneJointResult r = *SceneJointErrors(agents, gts, 2);
  EXPECT_NEAR(r.scene_min_ade, reference, 1e-15);
  EXPECT_GT(r.scene_min_ade, 0.0);
}

TEST(SceneJointErrorsTest, InconsistentModeCounts) {
  const PredictionSet a = Modes({kGt, kGt});
  const PredictionSet b = Modes({kGt});
  const PredictionSet* agents[] = {&a, &b};
  const Polyline gts[] = {kGt, kGt};
  EXPECT_EQ(GetErrorKind(SceneJointErrors(agents, gts, 1).status()),
            ErrorKind::kInconsistentModeCounts);
}

TEST(SceneJointErrorsTest, JointAtLeastMeanOfMarginals) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    fixtures::MetricInstance a = fixtures::RandomMetricInstance(rng, 6, 20);
    fixtures::MetricInstance b = a;
    for (Polyline& mode : b.prediction.modes) {
      for (Vec2& q : mode) q += Vec2(std::normal_distribution<double>(0, 2)(rng), 0.0);
    }
    const PredictionSet* agents[] = {&a.prediction, &b.prediction};
    const Polyline gts[] = {a.gt, b.gt};
    const int k = a.prediction.num_modes();
    const SceneJointResult joint = *SceneJointErrors(agents, gts, k);
    a.prediction.probabilities.reset();
    b.prediction.probabilities.reset();
    const double mean_marginal = 0.5 * (DisplacementErrors(a.prediction, a.gt, k)->min_fde +
                                         DisplacementErrors(b.prediction, b.gt, k)->min_fde);
    EXPECT_GE(joint.scene_min_fde, mean_marginal - 1e-12);
  }
}

TEST(BehaviorBucketTest, Examples) {
  EXPECT_EQ(ClassifyBehaviorBucket(fixtures::Line({0, 0}, {15, 0}, 31), 3.0),
            BehaviorBucket::kStraight);
  Polyline arc;
  for (int i = 0; i <= 30; ++i) {
    const double a = -kPi / 2 + (kPi / 2) * i / 30.0;
    arc.push_back(Vec2(10 * std::cos(a), 10 + 10 * std::sin(a)));
  }
  EXPECT_EQ(ClassifyBehaviorBucket(arc, 3.0), BehaviorBucket::kLeft);
  Polyline mirrored;
  for (const Vec2& p : arc) mirrored.push_back({p.x(), -p.y()});
  EXPECT_EQ(ClassifyBehaviorBucket(mirrored, 3.0), BehaviorBucket::kRight);
  EXPECT_EQ(ClassifyBehaviorBucket(Polyline(5, Vec2(1, 1)), 3.0), BehaviorBucket::kStationary);
  EXPECT_EQ(ClassifyBehaviorBucket(fixtures::Line({0, 0}, {1, 0}, 31), 3.0),
            BehaviorBucket::kStationary);
}

TEST(BehaviorBucketTest, SlightTurnAndUTurn) {
  const Polyline slight = {{0, 0}, {5, 0}, {10, 0}, {15, 3}};
  EXPECT_EQ(ClassifyBehaviorBucket(slight, 3.0), BehaviorBucket::kStraightLeft);
  const Polyline u_turn = {{0, 0}, {10, 0}, {12, 2}, {10, 4}, {0, 4}};
  EXPECT_EQ(ClassifyBehaviorBucket(u_turn, 3.0), BehaviorBucket::kLeftUTurn);
  for (int b = 0; b <= static_cast<int>(BehaviorBucket::kStationary); ++b) {
    const auto bucket = static_cast<BehaviorBucket>(b);
    EXPECT_EQ(ParseBehaviorBucket(BehaviorBucketName(bucket)), bucket);
  }
}

MapSample Sample(std::vector<ScoredPrediction> predictions,
                 BehaviorBucket bucket = BehaviorBucket::kStraight) {
  return {bucket, std::move(predictions)};
}

TEST(MeanAveragePrecisionTest, AllHitAndAllMiss) {
  const std::vector<MapSample> hits = {Sample({{1.0, true}}), Sample({{1.0, true}})};
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(hits, false)->mean_ap, 1.0);
  const std::vector<MapSample> misses = {Sample({{1.0, false}}), Sample({{0.5, false}})};
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(misses, false)->mean_ap, 0.0);
}

TEST(MeanAveragePrecisionTest, HitThenMissRanking) {
  const std::vector<MapSample> samples = {Sample({{0.9, true}}), Sample({{0.8, false}})};
  // Ranking: hit (P 1, R 0.5), miss (P 0.5, R 0.5).
  const double all_point = 1.0 * 0.5;
  const double eleven_point = 6.0 / 11.0;  // levels 0 .. 0.5 reach precision 1
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(samples, false)->mean_ap, all_point);
  EXPECT_NEAR(MeanAveragePrecision(samples, false, ApInterpolation::kElevenPoint)->mean_ap,
              eleven_point, 1e-12);
}

TEST(MeanAveragePrecisionTest, OnlyOneTruePositivePerAgent) {
  // Second hit of the same agent is a false positive unless soft.
  const std::vector<MapSample> samples = {Sample({{0.9, true}, {0.8, true}})};
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(samples, false)->mean_ap, 1.0);
  const std::vector<MapSample> two = {Sample({{0.9, true}, {0.85, true}}),
                                      Sample({{0.8, true}})};
  const double hard = MeanAveragePrecision(two, false)->mean_ap;
  const double soft = MeanAveragePrecision(two, true)->mean_ap;
  // Hard ranking: TP (1, .5), FP (.5, .5), TP (2/3, 1) -> .5 + 2/3 * .5.
  EXPECT_NEAR(hard, 0.5 + (2.0 / 3.0) * 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(soft, 1.0);
}

TEST(MeanAveragePrecisionTest, MeanOverNonEmptyBuckets) {
  const std::vector<MapSample> samples = {Sample({{0.9, true}}, BehaviorBucket::kLeft),
                                          Sample({{0.9, false}}, BehaviorBucket::kRight)};
  const MapResult r = *MeanAveragePrecision(samples, false);
  EXPECT_DOUBLE_EQ(r.mean_ap, 0.5);
  EXPECT_EQ(r.bucket_ap.size(), 2u);
  EXPECT_EQ(GetErrorKind(MeanAveragePrecision({}, false).status()), ErrorKind::kEmptyDataset);
}

TEST(OracleEquivalenceTest, FuzzedInstancesMatchBruteForce) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const fixtures::MetricInstance inst = fixtures::RandomMetricInstance(rng);
    const oracle::Metrics o = oracle::Evaluate(inst.prediction, inst.gt, inst.k, 2.0);
    const AccuracyResult a = *DisplacementErrors(inst.prediction, inst.gt, inst.k);
    const ProbabilisticResult p = *ProbabilisticErrors(inst.prediction, inst.gt, inst.k);
    ASSERT_NEAR(a.min_ade, o.min_ade, 1e-9);
    ASSERT_NEAR(a.min_fde, o.min_fde, 1e-9);
    ASSERT_NEAR(a.avg_fde, o.avg_fde, 1e-9);
    ASSERT_EQ(a.miss, o.miss_endpoint);
    ASSERT_NEAR(p.p_min_ade, o.p_min_ade, 1e-9);
    ASSERT_NEAR(p.p_min_fde, o.p_min_fde, 1e-9);
    ASSERT_NEAR(p.p_avg_fde, o.p_avg_fde, 1e-9);
    ASSERT_NEAR(p.brier_min_ade, o.brier_min_ade, 1e-9);
    ASSERT_NEAR(p.brier_min_fde, o.brier_min_fde, 1e-9);
    ASSERT_NEAR(p.p_miss, o.p_mr, 1e-9);
  }
}

}  // namespace
}  // namespace mpeval
