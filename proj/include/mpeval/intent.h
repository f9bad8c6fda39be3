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

// Lane-based intention clustering of predicted goals. Each goal is matched to
// nearby lanes that follow its heading, lanes are grouped into corridors via
// the lane graph, and each corridor becomes one intention with a probability,
// a mean position and a covariance.

#ifndef MPEVAL_INTENT_H_
#define MPEVAL_INTENT_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mpeval/geometry.h"
#include "mpeval/scene.h"

namespace mpeval {

enum class PartitionRule {
  // Lanes join a cluster when merge- or successor-related, transitively.
  kCorridor,
  // Only merge relations join lanes; successors stay apart.
  kLiteral,
};

absl::string_view PartitionRuleName(PartitionRule rule);
std::optional<PartitionRule> ParsePartitionRule(absl::string_view name);

struct IntentConfig {
  double search_radius = 20.0;
  double lane_threshold = 2.5;
  double max_angle = kPi / 4.0;
  double angle_floor = 0.01;
  double singleton_sigma_along = 2.0;
  double singleton_sigma_ortho = 0.05;
  double covariance_ortho_floor = 0.05;
  PartitionRule partition = PartitionRule::kCorridor;
};

absl::Status ValidateIntentConfig(const IntentConfig& config);

enum class DiscardReason {
  kNoLaneWithinThreshold,
  kAngleExceedsMax,
  kOffMap,
};

// "no_lane_within_t", "angle_exceeds_max", "off_map".
absl::string_view DiscardReasonName(DiscardReason reason);
std::optional<DiscardReason> ParseDiscardReason(absl::string_view name);

struct LaneCandidate {
  int lane = -1;  // index into scene.lanes
  double delta = 0.0;
  // Absolute heading difference, already floored at config.angle_floor.
  double angle = 0.0;
  double distance = 0.0;

  double Score() const { return delta / angle; }
};

struct CandidateSearch {
  std::vector<LaneCandidate> lanes;
  // Set iff `lanes` is empty.
  std::optional<DiscardReason> discard;
};

// Lanes within config.lane_threshold of `goal` (strictly, so delta > 0) whose
// local direction is within config.max_angle of `goal_heading`.
CandidateSearch CandidateLanes(const Vec2& goal, double goal_heading,
                               const Scene& scene, const IntentConfig& config);

// Disjoint groups of lane indices. Only lanes in `candidate_lanes` take part;
// relations through non-candidate lanes do not connect anything. Each group
// is sorted and groups are ordered by their smallest lane index.
std::vector<std::vector<int>> PartitionClusters(
    std::span<const int> candidate_lanes, const Scene& scene,
    PartitionRule rule = PartitionRule::kCorridor);

// Numerically stable softmax.
std::vector<double> Softmax(std::span<const double> logits);

// Row n holds the soft assignment of goal n over `clusters`. Rows of goals
// with no candidates are all zero.
std::vector<std::vector<double>> SoftAssign(
    std::span<const std::vector<LaneCandidate>> candidates,
    std::span<const std::vector<int>> clusters);

struct ClusterMoments {
  Vec2 mean = Vec2::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  bool singleton = false;
};

// Weighted mean and covariance of `goals` under `weights`, regularized: a
// cluster supported by one goal gets the fixed singleton covariance aligned
// with `lane_direction`, otherwise both eigenvalues are floored at
// covariance_ortho_floor^2.
absl::StatusOr<ClusterMoments> ClusterStats(std::span<const Vec2> goals,
                                            std::span<const double> weights,
                                            const Vec2& lane_direction,
                                            const IntentConfig& config);

// Softmax over clusters of the score-weighted assignment mass. Without
// scores every goal gets 1/N.
std::vector<double> ClusterProbabilities(
    const std::optional<std::vector<double>>& goal_scores,
    const std::vector<std::vector<double>>& alpha, int num_clusters);

struct ClusterMember {
  int goal_index = 0;
  double alpha = 0.0;

  bool operator==(const ClusterMember&) const = default;
};

struct IntentCluster {
  double gamma = 0.0;
  Vec2 mu = Vec2::Zero();
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
  // Unit lane direction at the member-lane waypoint nearest to mu.
  Vec2 direction = Vec2::UnitX();
  std::vector<std::string> lanes;
  std::vector<ClusterMember> members;

  bool operator==(const IntentCluster&) const = default;
};

struct DiscardedGoal {
  int goal_index = 0;
  DiscardReason reason = DiscardReason::kOffMap;

  bool operator==(const DiscardedGoal&) const = default;
};

struct IntentClusterSet {
  std::string scene_id;
  std::string agent_id;
  int num_goals = 0;
  std::vector<IntentCluster> clusters;
  // num_goals x clusters.size().
  std::vector<std::vector<double>> alpha;
  std::vector<DiscardedGoal> discarded;

  bool operator==(const IntentClusterSet&) const = default;
};

// Full pipeline over the goals (mode endpoints) of `prediction`. When every
// goal is discarded the result has no clusters and a full discard list.
absl::StatusOr<IntentClusterSet> ClusterGoals(const PredictionSet& prediction,
                                              const Scene& scene,
                                              const IntentConfig& config);

// Most probable cluster per goal, lower index on ties; nullopt for discarded
// goals.
std::vector<std::optional<int>> HardAssignment(const IntentClusterSet& set);

// One mode per cluster: the alpha-weighted mean of the member trajectories,
// which ends exactly at mu. Probabilities are the cluster gammas.
absl::StatusOr<PredictionSet> ClustersAsPrediction(
    const IntentClusterSet& set, const PredictionSet& prediction);

}  // namespace mpeval

#endif  // MPEVAL_INTENT_H_
