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

// Domain types shared by every part of the toolkit: lanes, agent tracks,
// scenes, multi-modal predictions and the rasterized drivable area. All
// coordinates are in a global bird's-eye-view metric frame.

#ifndef MPEVAL_SCENE_H_
#define MPEVAL_SCENE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/strings/string_view.h"

namespace mpeval {

using Vec2 = Eigen::Vector2d;
using Polyline = std::vector<Vec2>;

// Axis-aligned box. An empty box has min > max.
struct Box2 {
  Vec2 min{1.0, 1.0};
  Vec2 max{-1.0, -1.0};

  static Box2 Of(std::span<const Vec2> points);
  // Square of half-width `radius` centered at `center`.
  static Box2 Around(const Vec2& center, double radius);

  bool empty() const { return min.x() > max.x() || min.y() > max.y(); }
  bool Intersects(const Box2& other) const;
  void Extend(const Vec2& p);

  bool operator==(const Box2&) const = default;
};

struct Lane {
  Lane() = default;
  Lane(std::string id, Polyline centerline, std::vector<std::string> successors,
       std::vector<std::string> merges_with);

  std::string id;
  // Waypoint order defines the direction of travel.
  Polyline centerline;
  std::vector<std::string> successors;
  std::vector<std::string> merges_with;
  // Bounding box of the centerline waypoints, computed at construction.
  Box2 bbox;

  bool operator==(const Lane&) const = default;
};

enum class AgentCategory { kVehicle, kPedestrian, kCyclist, kOther };

absl::string_view AgentCategoryName(AgentCategory category);
std::optional<AgentCategory> ParseAgentCategory(absl::string_view name);

struct AgentDims {
  double length = 0.0;
  double width = 0.0;

  bool operator==(const AgentDims&) const = default;
};

struct TimedPoint {
  double t = 0.0;
  Vec2 position = Vec2::Zero();

  bool operator==(const TimedPoint&) const = default;
};

struct AgentTrack {
  std::string id;
  AgentCategory category = AgentCategory::kVehicle;
  std::optional<AgentDims> dims;
  std::vector<TimedPoint> observed;
  std::vector<TimedPoint> future;

  Polyline FuturePath() const;
  Polyline ObservedPath() const;

  bool operator==(const AgentTrack&) const = default;
};

struct Scene {
  std::string scene_id;
  double frequency_hz = 10.0;
  double history_s = 2.0;
  double horizon_s = 3.0;
  std::string focal_agent;
  std::optional<std::string> av_agent;
  std::vector<Lane> lanes;
  // Closed rings; the closing edge from last to first vertex is implicit.
  std::vector<Polyline> drivable_area;
  std::vector<AgentTrack> agents;

  // Number of future steps T = horizon_s * frequency_hz.
  int FutureSteps() const;
  const AgentTrack* FindAgent(absl::string_view id) const;
  // Index into `lanes`, or -1.
  int FindLane(absl::string_view id) const;
  const AgentTrack& Focal() const;

  bool operator==(const Scene&) const = default;
};

// K candidate futures for one agent, each exactly T points long.
struct PredictionSet {
  std::string scene_id;
  std::string agent_id;
  std::vector<Polyline> modes;
  std::optional<std::vector<double>> probabilities;
  std::optional<std::vector<double>> goal_scores;

  int num_modes() const { return static_cast<int>(modes.size()); }
  int horizon() const {
    return modes.empty() ? 0 : static_cast<int>(modes.front().size());
  }
  const Vec2& Goal(int mode) const { return modes[mode].back(); }

  bool operator==(const PredictionSet&) const = default;
};

struct OccupancyGrid {
  Vec2 origin = Vec2::Zero();
  double resolution = 1.0;
  int width = 0;
  int height = 0;
  // Row-major, width * height entries; nonzero means drivable.
  std::vector<std::uint8_t> drivable;

  // Cell index containing `p`, or nullopt when `p` is off the grid.
  std::optional<int> CellIndex(const Vec2& p) const;
  Vec2 CellCenter(int col, int row) const;
  bool IsDrivable(const Vec2& p) const;
  int DrivableCount() const;
};

// Checks every Scene invariant: lane waypoint counts and distinctness,
// finite coordinates, resolvable lane references, increasing timestamps,
// non-empty observations, focal agent with a future, integral horizon and
// drivable rings with at least three vertices.
absl::Status ValidateScene(const Scene& scene);

// K >= 1, equal mode lengths, finite coordinates, nonnegative probabilities
// and scores with one entry per mode. When `expected_steps` is given every
// mode must have that many points.
absl::Status ValidatePredictionSet(const PredictionSet& prediction,
                                   std::optional<int> expected_steps = {});

}  // namespace mpeval

#endif  // MPEVAL_SCENE_H_
