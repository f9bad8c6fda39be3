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

#include "mpeval/quality_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "absl/strings/str_cat.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

struct NearestLane {
  int lane = -1;
  PolylineProjection projection;
};

NearestLane FindNearestLane(const Scene& scene, const Vec2& point) {
  NearestLane best;
  best.projection.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.lanes.size(); ++i) {
    const PolylineProjection proj = PointToPolyline(point, scene.lanes[i].centerline);
    if (proj.distance < best.projection.distance) {
      best.lane = static_cast<int>(i);
      best.projection = proj;
    }
  }
  return best;
}

double PopulationVariance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return var / static_cast<double>(values.size());
}

double DirectionAngle(const Vec2& direction) {
  return std::atan2(direction.y(), direction.x());
}

bool MayOverlap(const OrientedBox& a, const OrientedBox& b) {
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  return (a.center - b.center).norm() <= ra + rb;
}

double BoxIou(const OrientedBox& a, const OrientedBox& b) {
  return MayOverlap(a, b) ? OrientedBoxIou(a, b) : 0.0;
}

int TopMode(const PredictionSet& prediction) {
  if (!prediction.probabilities) return 0;
  const std::vector<double>& p = *prediction.probabilities;
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

SpreadRatio SpreadRatioOf(double avg_fde, double min_fde) {
  if (min_fde > 0.0) return {avg_fde / min_fde, false};
  if (avg_fde > 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {1.0, false};
}

double YawVariance(std::span<const double> headings) {
  if (headings.empty()) return 0.0;
  double s = 0.0;
  double c = 0.0;
  for (double h : headings) {
    s += std::sin(h);
    c += std::cos(h);
  }
  const double mean = std::atan2(s, c);
  double var = 0.0;
  for (double h : headings) {
    const double d = WrapAngle(h - mean);
    var += d * d;
  }
  return var / static_cast<double>(headings.size());
}

std::vector<int> LaneFdeCandidates(const Scene& scene, const Vec2& endpoint,
                                   double heading, const LateralConfig& config) {
  std::vector<int> candidates;
  for (int lane : LanesWithinRadius(scene, endpoint, config.candidate_radius)) {
    const PolylineProjection proj =
        PointToPolyline(endpoint, scene.lanes[lane].centerline);
    const double angle =
        std::abs(WrapAngle(heading - DirectionAngle(proj.local_direction)));
    if (angle <= config.candidate_max_angle) candidates.push_back(lane);
  }
  return candidates;
}

absl::StatusOr<LateralDiversity> ComputeLateralDiversity(
    const PredictionSet& prediction, const Scene& scene,
    std::span<const Vec2> gt, const LateralConfig& config) {
  if (scene.lanes.empty()) {
    return MakeError(ErrorKind::kNoLanes,
                     absl::StrCat("scene ", scene.scene_id, " has no lanes"));
  }
  if (prediction.modes.empty() || gt.empty()) {
    return MakeError(ErrorKind::kLengthMismatch, "empty prediction or ground truth");
  }
  LateralDiversity result;
  std::set<int> reached;
  std::vector<double> headings;
  for (const Polyline& mode : prediction.modes) {
    const NearestLane nearest = FindNearestLane(scene, mode.back());
    if (nearest.lane >= 0 && nearest.projection.distance <= config.assign_threshold) {
      reached.insert(nearest.lane);
    }
    headings.push_back(HeadingAtEnd(mode));
  }
  result.lanes_reached = static_cast<int>(reached.size());
  result.yaw_variance = YawVariance(headings);

  const std::optional<double> gt_heading = TryHeadingAtEnd(gt);
  LateralConfig candidate_config = config;
  if (!gt_heading) candidate_config.candidate_max_angle = kPi;
  const std::vector<int> candidates = LaneFdeCandidates(
      scene, gt.back(), gt_heading.value_or(0.0), candidate_config);
  if (!candidates.empty()) {
    double sum = 0.0;
    for (int lane : candidates) {
      double best = std::numeric_limits<double>::infinity();
      for (const Polyline& mode : prediction.modes) {
        best = std::min(best,
                        PointToPolyline(mode.back(), scene.lanes[lane].centerline)
                            .distance);
      }
      sum += best;
    }
    result.min_lane_fde = sum / static_cast<double>(candidates.size());
  }
  return result;
}

absl::StatusOr<LongitudinalDiversity> ComputeLongitudinalDiversity(
    const PredictionSet& prediction, double frequency_hz) {
  const int steps = prediction.horizon();
  if (steps < 2) {
    return MakeError(ErrorKind::kTooShort,
                     absl::StrCat("need at least 2 points, got ", steps));
  }
  if (!(frequency_hz > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "frequency must be positive");
  }
  const double duration = (steps - 1) / frequency_hz;
  std::vector<double> speeds;
  std::vector<double> accels;
  for (const Polyline& mode : prediction.modes) {
    speeds.push_back(PathLength(mode) / duration);
    if (steps >= 3) {
      const double first = (mode[1] - mode[0]).norm() * frequency_hz;
      const double last = (mode[steps - 1] - mode[steps - 2]).norm() * frequency_hz;
      accels.push_back((last - first) / duration);
    }
  }
  LongitudinalDiversity result;
  result.speed_variance = PopulationVariance(speeds);
  if (steps >= 3) result.accel_variance = PopulationVariance(accels);
  return result;
}

DrivableCompliance ComputeDrivableCompliance(const PredictionSet& prediction,
                                             const OccupancyGrid& grid) {
  DrivableCompliance result;
  const int num_modes = prediction.num_modes();
  if (num_modes == 0) return result;
  int off_road = 0;
  std::set<int> touched;
  for (const Polyline& mode : prediction.modes) {
    bool leaves = false;
    for (const Vec2& p : mode) {
      const std::optional<int> cell = grid.CellIndex(p);
      if (cell && grid.drivable[*cell]) {
        touched.insert(*cell);
      } else {
        leaves = true;
      }
    }
    off_road += leaves;
  }
  result.off_road_rate = static_cast<double>(off_road) / num_modes;
  result.dac = static_cast<double>(num_modes - off_road) / num_modes;
  const int drivable = grid.DrivableCount();
  result.dao = drivable > 0 ? static_cast<double>(touched.size()) / drivable : 0.0;
  return result;
}

std::vector<OrientedBox> BoxesAlong(std::span<const Vec2> trajectory,
                                    const AgentDims& dims) {
  std::vector<OrientedBox> boxes(trajectory.size());
  double heading = 0.0;
  // Headings of degenerate segments inherit the previous one.
  std::vector<std::optional<double>> segment(trajectory.size());
  for (std::size_t t = 0; t + 1 < trajectory.size(); ++t) {
    const Vec2 d = trajectory[t + 1] - trajectory[t];
    if (d.x() != 0.0 || d.y() != 0.0) segment[t] = std::atan2(d.y(), d.x());
  }
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const std::size_t s = t + 1 < trajectory.size() ? t : (t == 0 ? 0 : t - 1);
    if (segment[s]) heading = *segment[s];
    boxes[t] = OrientedBox{trajectory[t], heading, dims.length, dims.width};
  }
  return boxes;
}

absl::StatusOr<SocialConsistency> ComputeSocialConsistency(
    std::span<const PredictionSet> predictions, std::span<const AgentDims> dims,
    double iou_threshold) {
  if (dims.size() != predictions.size()) {
    return MakeError(ErrorKind::kMissingDims, "one footprint per agent required");
  }
  SocialConsistency result;
  const std::size_t agents = predictions.size();
  if (agents < 2) return result;
  const int num_modes = predictions.front().num_modes();
  const int steps = predictions.front().horizon();
  for (const PredictionSet& p : predictions) {
    if (p.num_modes() != num_modes) {
      return MakeError(ErrorKind::kInconsistentModeCounts,
                       absl::StrCat("agent ", p.agent_id, " has ", p.num_modes(),
                                    " modes, expected ", num_modes));
    }
    if (p.horizon() != steps) {
      return MakeError(ErrorKind::kLengthMismatch, "agents have different horizons");
    }
  }

  // boxes[a][k][t]
  std::vector<std::vector<std::vector<OrientedBox>>> boxes(agents);
  for (std::size_t a = 0; a < agents; ++a) {
    for (const Polyline& mode : predictions[a].modes) {
      boxes[a].push_back(BoxesAlong(mode, dims[a]));
    }
  }

  int colliding = 0;
  for (int k = 0; k < num_modes; ++k) {
    bool collides = false;
    for (std::size_t a = 0; a < agents && !collides; ++a) {
      for (std::size_t b = a + 1; b < agents && !collides; ++b) {
        for (int t = 0; t < steps && !collides; ++t) {
          collides = BoxIou(boxes[a][k][t], boxes[b][k][t]) > iou_threshold;
        }
      }
    }
    colliding += collides;
  }
  result.scr = static_cast<double>(colliding) / num_modes;

  std::vector<int> top(agents);
  for (std::size_t a = 0; a < agents; ++a) top[a] = TopMode(predictions[a]);
  int overlapping = 0;
  for (std::size_t a = 0; a < agents; ++a) {
    bool overlaps = false;
    for (std::size_t b = 0; b < agents && !overlaps; ++b) {
      if (a == b) continue;
      for (int t = 0; t < steps && !overlaps; ++t) {
        overlaps = BoxIou(boxes[a][top[a]][t], boxes[b][top[b]][t]) > 0.0;
      }
    }
    overlapping += overlaps;
  }
  result.overlap_rate = static_cast<double>(overlapping) / agents;
  return result;
}

bool IsOncoming(const Scene& scene, const Vec2& endpoint, double heading,
                const OncomingConfig& config) {
  const NearestLane nearest = FindNearestLane(scene, endpoint);
  if (nearest.lane < 0 || nearest.projection.distance > config.lane_threshold) {
    return false;
  }
  const double angle = std::abs(
      WrapAngle(heading - DirectionAngle(nearest.projection.local_direction)));
  return angle > config.angle_cut_deg * kPi / 180.0;
}

double OncomingTrafficRatio(const PredictionSet& prediction, const Scene& scene,
                            const OncomingConfig& config) {
  if (prediction.modes.empty()) return 0.0;
  int oncoming = 0;
  for (const Polyline& mode : prediction.modes) {
    const std::optional<double> heading = TryHeadingAtEnd(mode);
    if (heading && IsOncoming(scene, mode.back(), *heading, config)) ++oncoming;
  }
  return static_cast<double>(oncoming) / prediction.num_modes();
}

}  // namespace mpeval
