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

#include "mpeval/scene.h"

#include <cmath>
#include <unordered_set>
#include <utility>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

constexpr char kErrorKindUrl[] = "mpeval/error-kind";

bool Finite(const Vec2& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); }

absl::Status Invariant(absl::string_view detail) {
  return MakeError(ErrorKind::kInvariantViolation, detail);
}

absl::Status ValidateTrack(const AgentTrack& track) {
  if (track.observed.empty()) {
    return Invariant(absl::StrCat("agent ", track.id, ": observed is empty"));
  }
  if (track.dims && !(track.dims->length > 0.0 && track.dims->width > 0.0)) {
    return Invariant(absl::StrCat("agent ", track.id, ": dims must be positive"));
  }
  for (const auto* states : {&track.observed, &track.future}) {
    for (std::size_t i = 0; i < states->size(); ++i) {
      const TimedPoint& s = (*states)[i];
      if (!std::isfinite(s.t) || !Finite(s.position)) {
        return Invariant(
            absl::StrCat("agent ", track.id, ": non-finite state at ", i));
      }
      if (i > 0 && !(s.t > (*states)[i - 1].t)) {
        return Invariant(absl::StrCat(
            "agent ", track.id, ": timestamps not strictly increasing at ", i));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kAllZeroProbabilities: return "AllZeroProbabilities";
    case ErrorKind::kInconsistentModeCounts: return "InconsistentModeCounts";
    case ErrorKind::kEmptyDataset: return "EmptyDataset";
    case ErrorKind::kTooShort: return "TooShort";
    case ErrorKind::kNoLanes: return "NoLanes";
    case ErrorKind::kEmptyDrivableArea: return "EmptyDrivableArea";
    case ErrorKind::kMissingDims: return "MissingDims";
    case ErrorKind::kDegenerateCluster: return "DegenerateCluster";
    case ErrorKind::kNotPsd: return "NotPSD";
    case ErrorKind::kCrossSceneMismatch: return "CrossSceneMismatch";
    case ErrorKind::kSchemaError: return "SchemaError";
    case ErrorKind::kInvariantViolation: return "InvariantViolation";
    case ErrorKind::kDanglingReference: return "DanglingReference";
    case ErrorKind::kProviderFailure: return "ProviderFailure";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kAllGoalsDiscarded: return "AllGoalsDiscarded";
  }
  return "Unknown";
}

absl::Status MakeError(ErrorKind kind, absl::string_view detail) {
  absl::StatusCode code = absl::StatusCode::kInvalidArgument;
  switch (kind) {
    case ErrorKind::kDanglingReference:
      code = absl::StatusCode::kNotFound;
      break;
    case ErrorKind::kNoLanes:
    case ErrorKind::kEmptyDrivableArea:
    case ErrorKind::kTooShort:
    case ErrorKind::kDegenerateCluster:
    case ErrorKind::kMissingDims:
      code = absl::StatusCode::kFailedPrecondition;
      break;
    case ErrorKind::kProviderFailure:
      code = absl::StatusCode::kUnavailable;
      break;
    default:
      break;
  }
  absl::Status status(code, absl::StrCat(ErrorKindName(kind), ": ", detail));
  status.SetPayload(kErrorKindUrl,
                    absl::Cord(std::to_string(static_cast<int>(kind))));
  return status;
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  absl::optional<absl::Cord> payload = status.GetPayload(kErrorKindUrl);
  if (!payload) return std::nullopt;
  return static_cast<ErrorKind>(std::stoi(std::string(*payload)));
}

Box2 Box2::Of(std::span<const Vec2> points) {
  Box2 box;
  for (const Vec2& p : points) box.Extend(p);
  return box;
}

Box2 Box2::Around(const Vec2& center, double radius) {
  return Box2{center - Vec2(radius, radius), center + Vec2(radius, radius)};
}

bool Box2::Intersects(const Box2& other) const {
  if (empty() || other.empty()) return false;
  return min.x() <= other.max.x() && other.min.x() <= max.x() &&
         min.y() <= other.max.y() && other.min.y() <= max.y();
}

void Box2::Extend(const Vec2& p) {
  if (empty()) {
    min = p;
    max = p;
    return;
  }
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

Lane::Lane(std::string id, Polyline centerline,
           std::vector<std::string> successors,
           std::vector<std::string> merges_with)
    : id(std::move(id)),
      centerline(std::move(centerline)),
      successors(std::move(successors)),
      merges_with(std::move(merges_with)),
      bbox(Box2::Of(this->centerline)) {}

absl::string_view AgentCategoryName(AgentCategory category) {
  switch (category) {
    case AgentCategory::kVehicle: return "vehicle";
    case AgentCategory::kPedestrian: return "pedestrian";
    case AgentCategory::kCyclist: return "cyclist";
    case AgentCategory::kOther: return "other";
  }
  return "other";
}

std::optional<AgentCategory> ParseAgentCategory(absl::string_view name) {
  if (name == "vehicle") return AgentCategory::kVehicle;
  if (name == "pedestrian") return AgentCategory::kPedestrian;
  if (name == "cyclist") return AgentCategory::kCyclist;
  if (name == "other") return AgentCategory::kOther;
  return std::nullopt;
}

Polyline AgentTrack::FuturePath() const {
  Polyline path;
  path.reserve(future.size());
  for (const TimedPoint& s : future) path.push_back(s.position);
  return path;
}

Polyline AgentTrack::ObservedPath() const {
  Polyline path;
  path.reserve(observed.size());
  for (const TimedPoint& s : observed) path.push_back(s.position);
  return path;
}

int Scene::FutureSteps() const {
  return static_cast<int>(std::lround(horizon_s * frequency_hz));
}

const AgentTrack* Scene::FindAgent(absl::string_view id) const {
  for (const AgentTrack& agent : agents) {
    if (agent.id == id) return &agent;
  }
  return nullptr;
}

int Scene::FindLane(absl::string_view id) const {
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    if (lanes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

const AgentTrack& Scene::Focal() const { return *FindAgent(focal_agent); }

std::optional<int> OccupancyGrid::CellIndex(const Vec2& p) const {
  const double fx = std::floor((p.x() - origin.x()) / resolution);
  const double fy = std::floor((p.y() - origin.y()) / resolution);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < width && fy < height)) {
    return std::nullopt;
  }
  return static_cast<int>(fy) * width + static_cast<int>(fx);
}

Vec2 OccupancyGrid::CellCenter(int col, int row) const {
  return origin + Vec2((col + 0.5) * resolution, (row + 0.5) * resolution);
}

bool OccupancyGrid::IsDrivable(const Vec2& p) const {
  const std::optional<int> cell = CellIndex(p);
  return cell && drivable[*cell] != 0;
}

int OccupancyGrid::DrivableCount() const {
  int count = 0;
  for (std::uint8_t v : drivable) count += v != 0;
  return count;
}

absl::Status ValidateScene(const Scene& scene) {
  if (scene.scene_id.empty()) return Invariant("scene_id is empty");
  if (!(scene.frequency_hz > 0.0) || !std::isfinite(scene.frequency_hz)) {
    return Invariant("frequency_hz must be positive");
  }
  if (!(scene.history_s >= 0.0) || !std::isfinite(scene.history_s)) {
    return Invariant("history_s must be nonnegative");
  }
  const double steps = scene.horizon_s * scene.frequency_hz;
  if (!std::isfinite(steps) || steps < 0.5 ||
      std::abs(steps - std::round(steps)) > 1e-6) {
    return Invariant(absl::StrCat("horizon_s * frequency_hz = ", steps,
                                  " is not a positive integer"));
  }

  std::unordered_set<std::string> lane_ids;
  for (const Lane& lane : scene.lanes) {
    if (!lane_ids.insert(lane.id).second) {
      return Invariant(absl::StrCat("duplicate lane id ", lane.id));
    }
  }
  for (const Lane& lane : scene.lanes) {
    if (lane.centerline.size() < 2) {
      return Invariant(absl::StrCat("lane ", lane.id, " has fewer than 2 waypoints"));
    }
    for (std::size_t i = 0; i < lane.centerline.size(); ++i) {
      if (!Finite(lane.centerline[i])) {
        return Invariant(absl::StrCat("lane ", lane.id, " has a non-finite waypoint"));
      }
      if (i > 0 && lane.centerline[i] == lane.centerline[i - 1]) {
        return Invariant(absl::StrCat("lane ", lane.id,
                                      " repeats waypoint ", i));
      }
    }
    for (const auto* refs : {&lane.successors, &lane.merges_with}) {
      for (const std::string& ref : *refs) {
        if (!lane_ids.contains(ref)) {
          return Invariant(absl::StrCat("lane ", lane.id,
                                        " references unknown lane ", ref));
        }
      }
    }
  }

  for (std::size_t i = 0; i < scene.drivable_area.size(); ++i) {
    const Polyline& ring = scene.drivable_area[i];
    if (ring.size() < 3) {
      return Invariant(absl::StrCat("drivable ring ", i, " has fewer than 3 vertices"));
    }
    for (const Vec2& p : ring) {
      if (!Finite(p)) {
        return Invariant(absl::StrCat("drivable ring ", i, " is not finite"));
      }
    }
  }

  std::unordered_set<std::string> agent_ids;
  for (const AgentTrack& agent : scene.agents) {
    if (!agent_ids.insert(agent.id).second) {
      return Invariant(absl::StrCat("duplicate agent id ", agent.id));
    }
    MPEVAL_RETURN_IF_ERROR(ValidateTrack(agent));
  }
  const AgentTrack* focal = scene.FindAgent(scene.focal_agent);
  if (focal == nullptr) {
    return Invariant(absl::StrCat("focal agent ", scene.focal_agent, " not found"));
  }
  if (focal->future.empty()) {
    return Invariant("focal agent has no future");
  }
  if (scene.av_agent && scene.FindAgent(*scene.av_agent) == nullptr) {
    return Invariant(absl::StrCat("av agent ", *scene.av_agent, " not found"));
  }
  return absl::OkStatus();
}

absl::Status ValidatePredictionSet(const PredictionSet& prediction,
                                   std::optional<int> expected_steps) {
  if (prediction.modes.empty()) {
    return Invariant("prediction has no modes");
  }
  const std::size_t steps = prediction.modes.front().size();
  if (steps == 0) return Invariant("prediction modes are empty");
  for (std::size_t k = 0; k < prediction.modes.size(); ++k) {
    if (prediction.modes[k].size() != steps) {
      return MakeError(ErrorKind::kLengthMismatch,
                       absl::StrCat("mode ", k, " has ", prediction.modes[k].size(),
                                    " points, mode 0 has ", steps));
    }
    for (const Vec2& p : prediction.modes[k]) {
      if (!Finite(p)) return Invariant(absl::StrCat("mode ", k, " is not finite"));
    }
  }
  if (expected_steps && static_cast<int>(steps) != *expected_steps) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrCat("modes have ", steps, " points, expected ",
                                  *expected_steps));
  }
  for (const auto* values : {&prediction.probabilities, &prediction.goal_scores}) {
    if (!values->has_value()) continue;
    if ((*values)->size() != prediction.modes.size()) {
      return MakeError(ErrorKind::kLengthMismatch,
                       "per-mode values do not match the number of modes");
    }
    for (double v : **values) {
      if (!std::isfinite(v) || v < 0.0) {
        return Invariant("per-mode values must be finite and nonnegative");
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace mpeval
