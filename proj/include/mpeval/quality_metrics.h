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

// Diversity and admissibility metrics.

#ifndef MPEVAL_QUALITY_METRICS_H_
#define MPEVAL_QUALITY_METRICS_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "mpeval/geometry.h"
#include "mpeval/scene.h"

namespace mpeval {

// avgFDE / minFDE. When the denominator is zero the ratio is 1 if the
// numerator is also zero, otherwise `infinite` is set and `value` is +inf.
struct SpreadRatio {
  double value = 1.0;
  bool infinite = false;
};

SpreadRatio SpreadRatioOf(double avg_fde, double min_fde);
inline SpreadRatio Rf(double avg_fde, double min_fde) {
  return SpreadRatioOf(avg_fde, min_fde);
}
inline SpreadRatio PRf(double p_avg_fde, double p_min_fde) {
  return SpreadRatioOf(p_avg_fde, p_min_fde);
}

// Population variance of the headings about their circular mean, with each
// deviation wrapped to (-pi, pi].
double YawVariance(std::span<const double> headings);

struct LateralConfig {
  // Endpoint-to-lane distance for a mode to count as reaching a lane.
  double assign_threshold = 2.5;
  // Candidate lanes for the lane-FDE are searched around the ground-truth
  // endpoint and must be within `candidate_max_angle` of its final heading.
  double candidate_radius = 20.0;
  double candidate_max_angle = kPi / 4.0;
};

struct LateralDiversity {
  int lanes_reached = 0;
  double yaw_variance = 0.0;
  // Mean over candidate lanes of the closest mode endpoint; nullopt when no
  // candidate lane survives the direction filter.
  std::optional<double> min_lane_fde;
};

absl::StatusOr<LateralDiversity> ComputeLateralDiversity(
    const PredictionSet& prediction, const Scene& scene,
    std::span<const Vec2> gt, const LateralConfig& config = {});

// Candidate lanes (indices) for the lane-FDE around a ground-truth endpoint.
std::vector<int> LaneFdeCandidates(const Scene& scene, const Vec2& endpoint,
                                   double heading, const LateralConfig& config);

struct LongitudinalDiversity {
  double speed_variance = 0.0;
  // Requires T >= 3.
  std::optional<double> accel_variance;
};

// Per mode, average speed is path length over the (T - 1) / f seconds the
// points span, and average acceleration is (last step speed - first step
// speed) over the same duration.
absl::StatusOr<LongitudinalDiversity> ComputeLongitudinalDiversity(
    const PredictionSet& prediction, double frequency_hz);

struct DrivableCompliance {
  double off_road_rate = 0.0;
  double dac = 1.0;
  double dao = 0.0;
};

// A mode is off-road when any of its points lands on a non-drivable or
// off-grid cell.
DrivableCompliance ComputeDrivableCompliance(const PredictionSet& prediction,
                                             const OccupancyGrid& grid);

inline constexpr AgentDims kDefaultVehicleDims{4.7, 2.0};

struct SocialConsistency {
  double scr = 0.0;
  double overlap_rate = 0.0;
};

// Boxes follow each trajectory with the heading of the adjacent segment.
std::vector<OrientedBox> BoxesAlong(std::span<const Vec2> trajectory,
                                    const AgentDims& dims);

// `predictions` and `dims` are parallel, one entry per agent. SCR is the
// fraction of joint samples in which some pair of agents exceeds
// `iou_threshold` at a common timestep; the overlap rate uses each agent's
// top-1 mode and any positive intersection.
absl::StatusOr<SocialConsistency> ComputeSocialConsistency(
    std::span<const PredictionSet> predictions, std::span<const AgentDims> dims,
    double iou_threshold = 0.05);

struct OncomingConfig {
  double angle_cut_deg = 90.0;
  double lane_threshold = 2.5;
};

// True when the nearest lane within the threshold of `endpoint` runs at more
// than the cut angle to `heading`.
bool IsOncoming(const Scene& scene, const Vec2& endpoint, double heading,
                const OncomingConfig& config = {});

// Fraction of all K modes heading against the nearest lane at their endpoint.
double OncomingTrafficRatio(const PredictionSet& prediction, const Scene& scene,
                            const OncomingConfig& config = {});

}  // namespace mpeval

#endif  // MPEVAL_QUALITY_METRICS_H_
