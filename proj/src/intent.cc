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

#include "mpeval/intent.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "Eigen/Eigenvalues"
#include "absl/strings/str_cat.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

constexpr double kSingletonShare = 0.999;

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int Find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void Union(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    // Smaller root wins so the representative is deterministic.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

Vec2 ClusterDirection(const Scene& scene, std::span<const int> lanes,
                      const Vec2& mu) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 direction = Vec2::UnitX();
  for (int lane : lanes) {
    const PolylineProjection proj =
        PointToPolyline(mu, scene.lanes[lane].centerline);
    if (proj.distance < best) {
      best = proj.distance;
      direction = proj.local_direction;
    }
  }
  return direction;
}

}  // namespace

absl::string_view PartitionRuleName(PartitionRule rule) {
  return rule == PartitionRule::kLiteral ? "literal" : "corridor";
}

std::optional<PartitionRule> ParsePartitionRule(absl::string_view name) {
  if (name == "corridor") return PartitionRule::kCorridor;
  if (name == "literal") return PartitionRule::kLiteral;
  return std::nullopt;
}

absl::Status ValidateIntentConfig(const IntentConfig& config) {
  const double values[] = {config.search_radius,
                           config.lane_threshold,
                           config.angle_floor,
                           config.singleton_sigma_along,
                           config.singleton_sigma_ortho,
                           config.covariance_ortho_floor};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      return MakeError(ErrorKind::kInvalidConfig,
                       "intent parameters must be positive and finite");
    }
  }
  if (!(config.max_angle > 0.0 && config.max_angle < kPi)) {
    return MakeError(ErrorKind::kInvalidConfig, "max_angle must be in (0, pi)");
  }
  return absl::OkStatus();
}

absl::string_view DiscardReasonName(DiscardReason reason) {
  switch (reason) {
    case DiscardReason::kNoLaneWithinThreshold: return "no_lane_within_t";
    case DiscardReason::kAngleExceedsMax: return "angle_exceeds_max";
    case DiscardReason::kOffMap: return "off_map";
  }
  return "off_map";
}

std::optional<DiscardReason> ParseDiscardReason(absl::string_view name) {
  if (name == "no_lane_within_t") return DiscardReason::kNoLaneWithinThreshold;
  if (name == "angle_exceeds_max") return DiscardReason::kAngleExceedsMax;
  if (name == "off_map") return DiscardReason::kOffMap;
  return std::nullopt;
}

CandidateSearch CandidateLanes(const Vec2& goal, double goal_heading,
                               const Scene& scene, const IntentConfig& config) {
  CandidateSearch search;
  const std::vector<int> nearby =
      LanesWithinRadius(scene, goal, config.search_radius);
  if (nearby.empty()) {
    search.discard = DiscardReason::kOffMap;
    return search;
  }
  bool any_close = false;
  for (int lane : nearby) {
    const PolylineProjection proj =
        PointToPolyline(goal, scene.lanes[lane].centerline);
    if (!(proj.distance < config.lane_threshold)) continue;
    any_close = true;
    const double lane_heading =
        std::atan2(proj.local_direction.y(), proj.local_direction.x());
    const double angle = std::abs(WrapAngle(goal_heading - lane_heading));
    if (angle > config.max_angle) continue;
    search.lanes.push_back(LaneCandidate{
        .lane = lane,
        .delta = 1.0 - proj.distance / config.lane_threshold,
        .angle = std::max(angle, config.angle_floor),
        .distance = proj.distance,
    });
  }
  if (search.lanes.empty()) {
    search.discard = any_close ? DiscardReason::kAngleExceedsMax
                               : DiscardReason::kNoLaneWithinThreshold;
  }
  return search;
}

std::vector<std::vector<int>> PartitionClusters(
    std::span<const int> candidate_lanes, const Scene& scene,
    PartitionRule rule) {
  std::vector<int> lanes(candidate_lanes.begin(), candidate_lanes.end());
  std::sort(lanes.begin(), lanes.end());
  lanes.erase(std::unique(lanes.begin(), lanes.end()), lanes.end());

  std::map<std::string, int> slot;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    slot[scene.lanes[lanes[i]].id] = static_cast<int>(i);
  }
  DisjointSets sets(static_cast<int>(lanes.size()));
  const auto join_all = [&](int i, const std::vector<std::string>& ids) {
    for (const std::string& id : ids) {
      const auto it = slot.find(id);
      if (it != slot.end()) sets.Union(i, it->second);
    }
  };
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const Lane& lane = scene.lanes[lanes[i]];
    join_all(static_cast<int>(i), lane.merges_with);
    if (rule == PartitionRule::kCorridor) {
      join_all(static_cast<int>(i), lane.successors);
    }
  }

  // Lanes are sorted, so groups come out sorted and ordered by first member.
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    groups[sets.Find(static_cast<int>(i))].push_back(lanes[i]);
  }
  std::vector<std::vector<int>> clusters;
  for (auto& [root, members] : groups) clusters.push_back(std::move(members));
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<std::vector<double>> SoftAssign(
    std::span<const std::vector<LaneCandidate>> candidates,
    std::span<const std::vector<int>> clusters) {
  std::vector<int> cluster_of_lane;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    for (int lane : clusters[k]) {
      if (lane >= static_cast<int>(cluster_of_lane.size())) {
        cluster_of_lane.resize(lane + 1, -1);
      }
      cluster_of_lane[lane] = static_cast<int>(k);
    }
  }
  std::vector<std::vector<double>> alpha(
      candidates.size(), std::vector<double>(clusters.size(), 0.0));
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    std::vector<std::optional<double>> best(clusters.size());
    for (const LaneCandidate& c : candidates[n]) {
      const int k = c.lane < static_cast<int>(cluster_of_lane.size())
                        ? cluster_of_lane[c.lane]
                        : -1;
      if (k < 0) continue;
      best[k] = std::max(best[k].value_or(-1.0), c.Score());
    }
    std::vector<int> reachable;
    std::vector<double> logits;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      if (!best[k]) continue;
      reachable.push_back(static_cast<int>(k));
      logits.push_back(*best[k]);
    }
    const std::vector<double> weights = Softmax(logits);
    for (std::size_t i = 0; i < reachable.size(); ++i) {
      alpha[n][reachable[i]] = weights[i];
    }
  }
  return alpha;
}

absl::StatusOr<ClusterMoments> ClusterStats(std::span<const Vec2> goals,
                                            std::span<const double> weights,
                                            const Vec2& lane_direction,
                                            const IntentConfig& config) {
  if (goals.size() != weights.size()) {
    return MakeError(ErrorKind::kLengthMismatch, "one weight per goal required");
  }
  double total = 0.0;
  double largest = 0.0;
  for (double w : weights) {
    total += w;
    largest = std::max(largest, w);
  }
  if (!(total > 0.0)) {
    return MakeError(ErrorKind::kDegenerateCluster, "cluster has zero weight");
  }
  ClusterMoments out;
  for (std::size_t n = 0; n < goals.size(); ++n) {
    out.mean += weights[n] * goals[n];
  }
  out.mean /= total;

  Vec2 along = lane_direction;
  if (along.norm() > 0.0) {
    along.normalize();
  } else {
    along = Vec2::UnitX();
  }
  const Vec2 ortho(-along.y(), along.x());

  if (largest >= kSingletonShare * total) {
    out.singleton = true;
    const double sa = config.singleton_sigma_along;
    const double so = config.singleton_sigma_ortho;
    out.covariance = sa * sa * along * along.transpose() +
                     so * so * ortho * ortho.transpose();
    return out;
  }

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (std::size_t n = 0; n < goals.size(); ++n) {
    const Vec2 d = goals[n] - out.mean;
    cov += weights[n] * d * d.transpose();
  }
  cov /= total;
  cov = 0.5 * (cov + cov.transpose());

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
  const double floor =
      config.covariance_ortho_floor * config.covariance_ortho_floor;
  Eigen::Vector2d values = solver.eigenvalues();
  for (int i = 0; i < 2; ++i) values[i] = std::max(values[i], floor);
  const Eigen::Matrix2d vectors = solver.eigenvectors();
  out.covariance = vectors * values.asDiagonal() * vectors.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

std::vector<double> ClusterProbabilities(
    const std::optional<std::vector<double>>& goal_scores,
    const std::vector<std::vector<double>>& alpha, int num_clusters) {
  const std::size_t num_goals = alpha.size();
  std::vector<double> mass(num_clusters, 0.0);
  for (std::size_t n = 0; n < num_goals; ++n) {
    const double s = goal_scores ? (*goal_scores)[n]
                                 : 1.0 / static_cast<double>(num_goals);
    for (int k = 0; k < num_clusters; ++k) mass[k] += s * alpha[n][k];
  }
  return Softmax(mass);
}

absl::StatusOr<IntentClusterSet> ClusterGoals(const PredictionSet& prediction,
                                              const Scene& scene,
                                              const IntentConfig& config) {
  MPEVAL_RETURN_IF_ERROR(ValidateIntentConfig(config));
  if (prediction.goal_scores &&
      static_cast<int>(prediction.goal_scores->size()) != prediction.num_modes()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "goal_scores must have one entry per mode");
  }
  IntentClusterSet set;
  set.scene_id = prediction.scene_id;
  set.agent_id = prediction.agent_id;
  set.num_goals = prediction.num_modes();

  std::vector<Vec2> goals;
  std::vector<std::vector<LaneCandidate>> candidates;
  std::vector<int> all_lanes;
  for (int n = 0; n < set.num_goals; ++n) {
    const Polyline& mode = prediction.modes[n];
    goals.push_back(mode.back());
    CandidateSearch search =
        CandidateLanes(mode.back(), HeadingAtEnd(mode), scene, config);
    if (search.discard) {
      set.discarded.push_back(DiscardedGoal{n, *search.discard});
    }
    for (const LaneCandidate& c : search.lanes) all_lanes.push_back(c.lane);
    candidates.push_back(std::move(search.lanes));
  }

  const std::vector<std::vector<int>> seeds =
      PartitionClusters(all_lanes, scene, config.partition);
  set.alpha = SoftAssign(candidates, seeds);
  if (seeds.empty()) return set;

  const std::vector<double> gamma = ClusterProbabilities(
      prediction.goal_scores, set.alpha, static_cast<int>(seeds.size()));
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    std::vector<double> weights(set.num_goals);
    IntentCluster cluster;
    for (int n = 0; n < set.num_goals; ++n) {
      weights[n] = set.alpha[n][k];
      if (weights[n] > 0.0) cluster.members.push_back({n, weights[n]});
    }
    double total = 0.0;
    Vec2 mean = Vec2::Zero();
    for (int n = 0; n < set.num_goals; ++n) {
      total += weights[n];
      mean += weights[n] * goals[n];
    }
    if (total > 0.0) mean /= total;
    cluster.direction = ClusterDirection(scene, seeds[k], mean);
    MPEVAL_ASSIGN_OR_RETURN(
        const ClusterMoments moments,
        ClusterStats(goals, weights, cluster.direction, config));
    cluster.gamma = gamma[k];
    cluster.mu = moments.mean;
    cluster.sigma = moments.covariance;
    for (int lane : seeds[k]) cluster.lanes.push_back(scene.lanes[lane].id);
    set.clusters.push_back(std::move(cluster));
  }
  return set;
}

std::vector<std::optional<int>> HardAssignment(const IntentClusterSet& set) {
  std::vector<std::optional<int>> out(set.alpha.size());
  for (std::size_t n = 0; n < set.alpha.size(); ++n) {
    const std::vector<double>& row = set.alpha[n];
    double best = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] > best) {
        best = row[k];
        out[n] = static_cast<int>(k);
      }
    }
  }
  return out;
}

absl::StatusOr<PredictionSet> ClustersAsPrediction(
    const IntentClusterSet& set, const PredictionSet& prediction) {
  if (set.clusters.empty()) {
    return MakeError(ErrorKind::kAllGoalsDiscarded,
                     absl::StrCat("agent ", set.agent_id, " in scene ",
                                  set.scene_id, " has no surviving goals"));
  }
  if (set.num_goals != prediction.num_modes()) {
    return MakeError(ErrorKind::kInconsistentModeCounts,
                     "cluster set does not match the prediction");
  }
  PredictionSet out;
  out.scene_id = prediction.scene_id;
  out.agent_id = prediction.agent_id;
  out.probabilities.emplace();
  const int steps = prediction.horizon();
  for (const IntentCluster& cluster : set.clusters) {
    Polyline mode(steps, Vec2::Zero());
    double total = 0.0;
    for (const ClusterMember& m : cluster.members) total += m.alpha;
    for (const ClusterMember& m : cluster.members) {
      const Polyline& src = prediction.modes[m.goal_index];
      for (int t = 0; t < steps; ++t) mode[t] += (m.alpha / total) * src[t];
    }
    // Pin the endpoint to the reported mean to avoid rounding drift.
    mode.back() = cluster.mu;
    out.modes.push_back(std::move(mode));
    out.probabilities->push_back(cluster.gamma);
  }
  return out;
}

}  // namespace mpeval
