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

// Accuracy metrics for multi-modal predictions: displacement errors, miss
// rate, probability-aware variants, KDE likelihood, scene-level joint errors
// and bucketed mean average precision.

#ifndef MPEVAL_ACCURACY_METRICS_H_
#define MPEVAL_ACCURACY_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mpeval/scene.h"

namespace mpeval {

// -ln(0.05): the cap on the probability penalty.
inline constexpr double kMaxProbabilityPenalty = 2.995732273553991;

// The modes that take part in top-k metrics and their renormalized
// probabilities.
struct TopK {
  std::vector<int> modes;
  std::vector<double> probabilities;
};

// Picks the k most probable modes (ties to the lower index) and renormalizes
// their probabilities to sum to one. Without probabilities the first k modes
// are used with a uniform 1/k distribution.
absl::StatusOr<TopK> NormalizeTopK(
    const std::optional<std::vector<double>>& probabilities, int num_modes,
    int k);
absl::StatusOr<TopK> NormalizeTopK(const PredictionSet& prediction, int k);

enum class MissDefinition { kEndpoint, kMaxPointwise };

absl::string_view MissDefinitionName(MissDefinition definition);
std::optional<MissDefinition> ParseMissDefinition(absl::string_view name);

struct MissCriterion {
  double threshold = 2.0;
  MissDefinition definition = MissDefinition::kEndpoint;
};

struct AccuracyResult {
  double min_ade = 0.0;
  double min_fde = 0.0;
  double avg_fde = 0.0;
  int best_ade_mode = 0;
  int best_fde_mode = 0;
  // Final heading of the best-FDE mode minus the ground-truth final heading,
  // wrapped to (-pi, pi].
  double heading_error = 0.0;
  // True when either trajectory was stationary and the heading fell back to 0.
  bool degenerate_heading = false;
  bool miss = false;
};

// Mean pointwise L2 distance.
double AverageDisplacement(std::span<const Vec2> mode, std::span<const Vec2> gt);
double FinalDisplacement(std::span<const Vec2> mode, std::span<const Vec2> gt);
double MaxDisplacement(std::span<const Vec2> mode, std::span<const Vec2> gt);

absl::StatusOr<AccuracyResult> DisplacementErrors(
    const PredictionSet& prediction, std::span<const Vec2> gt, int k,
    const MissCriterion& miss = {});

// True iff every top-k mode is beyond the threshold under the definition.
absl::StatusOr<bool> IsMiss(const PredictionSet& prediction,
                            std::span<const Vec2> gt, int k,
                            const MissCriterion& miss);

// min(-ln p, -ln 0.05); p = 0 yields the cap.
double ProbabilityPenalty(double p);
// (1 - p)^2.
double BrierPenalty(double p);

struct ProbabilisticResult {
  double p_min_ade = 0.0;
  double p_min_fde = 0.0;
  double p_avg_fde = 0.0;
  double brier_min_ade = 0.0;
  double brier_min_fde = 0.0;
  // (1 - p) when the best-FDE mode lands within the threshold, else 1.
  double p_miss = 0.0;
  // Normalized probabilities of the best-ADE and best-FDE modes.
  double best_ade_probability = 0.0;
  double best_fde_probability = 0.0;
};

absl::StatusOr<ProbabilisticResult> ProbabilisticErrors(
    const PredictionSet& prediction, std::span<const Vec2> gt, int k,
    double miss_threshold = 2.0);

// Probability floor applied to the KDE before taking the log.
inline constexpr double kDensityFloor = 1e-12;
inline constexpr double kMinKdeBandwidth = 0.1;

// Scott's rule in two dimensions, h = sigma * n^(-1/6) with sigma the root
// mean of the per-axis sample variances, floored at kMinKdeBandwidth.
double ScottBandwidth(std::span<const Vec2> samples);

// Mean over timesteps of -ln of an isotropic Gaussian KDE over the mode
// positions, evaluated at the ground truth. Modes are weighted by their
// normalized probabilities when present. `bandwidth` of nullopt selects
// Scott's rule per timestep.
absl::StatusOr<double> NllKde(const PredictionSet& prediction,
                              std::span<const Vec2> gt,
                              std::optional<double> bandwidth = {});

struct SceneJointResult {
  double scene_min_ade = 0.0;
  double scene_min_fde = 0.0;
};

// Joint sample j pairs mode j of every agent; the best joint sample over the
// first k indices is reported. Mode indices are assumed to be consistent
// across agents.
absl::StatusOr<SceneJointResult> SceneJointErrors(
    std::span<const PredictionSet* const> predictions,
    std::span<const Polyline> gts, int k);

enum class BehaviorBucket {
  kStraight,
  kStraightLeft,
  kStraightRight,
  kLeft,
  kRight,
  kLeftUTurn,
  kRightUTurn,
  kStationary,
};

absl::string_view BehaviorBucketName(BehaviorBucket bucket);
std::optional<BehaviorBucket> ParseBehaviorBucket(absl::string_view name);

struct BucketThresholds {
  double speed_floor = 0.5;        // m/s
  double straight_deg = 15.0;      // below: straight
  double slight_turn_deg = 40.0;   // below: straight-left/right
  double turn_deg = 135.0;         // below: left/right, above: u-turn
};

BehaviorBucket ClassifyBehaviorBucket(std::span<const Vec2> gt,
                                      double horizon_s,
                                      const BucketThresholds& thresholds = {});

struct ScoredPrediction {
  double confidence = 0.0;
  bool hit = false;
};

// All predictions issued for one agent together with its behavior bucket.
struct MapSample {
  BehaviorBucket bucket = BehaviorBucket::kStraight;
  std::vector<ScoredPrediction> predictions;
};

enum class ApInterpolation { kAllPoint, kElevenPoint };

struct MapResult {
  double mean_ap = 0.0;
  std::map<BehaviorBucket, double> bucket_ap;
};

// Each agent contributes at most one true positive: its highest-confidence
// hit. Later hits count as false positives, or are dropped when `soft`.
absl::StatusOr<MapResult> MeanAveragePrecision(
    std::span<const MapSample> samples, bool soft,
    ApInterpolation interpolation = ApInterpolation::kAllPoint);

}  // namespace mpeval

#endif  // MPEVAL_ACCURACY_METRICS_H_
