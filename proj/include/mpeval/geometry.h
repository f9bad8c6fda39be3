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

// Geometric primitives over lanes, trajectories and boxes.

#ifndef MPEVAL_GEOMETRY_H_
#define MPEVAL_GEOMETRY_H_

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "mpeval/scene.h"

namespace mpeval {

inline constexpr double kPi = 3.14159265358979323846;

// Maps an angle to (-pi, pi].
double WrapAngle(double angle);

struct PolylineProjection {
  // Distance to the nearest waypoint (not to the segments between them).
  double distance = 0.0;
  int nearest_index = 0;
  // Unit direction of travel at the nearest waypoint: forward difference,
  // backward difference at the last waypoint.
  Vec2 local_direction = Vec2::UnitX();
};

// Requires a polyline with >= 2 points and distinct consecutive points.
// Ties resolve to the lower waypoint index.
PolylineProjection PointToPolyline(const Vec2& point,
                                   std::span<const Vec2> polyline);

// Indices into scene.lanes whose waypoint bounding box intersects the square
// of half-width `radius` around `point`. When nothing is found the query is
// retried once with twice the radius, so the result may still be empty.
std::vector<int> LanesWithinRadius(const Scene& scene, const Vec2& point,
                                   double radius);

// Heading of the last segment with distinct endpoints, in (-pi, pi]. Returns
// nullopt when all points coincide (or fewer than two points are given).
std::optional<double> TryHeadingAtEnd(std::span<const Vec2> trajectory);

// As above, with 0 for stationary trajectories.
double HeadingAtEnd(std::span<const Vec2> trajectory);

// Heading of the first segment with distinct endpoints.
std::optional<double> TryHeadingAtStart(std::span<const Vec2> trajectory);

// Sum of segment lengths.
double PathLength(std::span<const Vec2> trajectory);

// Even-odd point-in-polygon test; the ring is implicitly closed.
bool PointInRing(const Vec2& point, std::span<const Vec2> ring);

// Grid over the bounding box of all drivable rings padded by one cell; a cell
// is drivable iff its center lies inside any ring.
absl::StatusOr<OccupancyGrid> RasterizeDrivable(const Scene& scene,
                                                double resolution);
absl::StatusOr<OccupancyGrid> RasterizeRings(std::span<const Polyline> rings,
                                             double resolution);

struct OrientedBox {
  Vec2 center = Vec2::Zero();
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;

  // Counter-clockwise corners.
  std::array<Vec2, 4> Corners() const;
};

// Signed shoelace area; positive for counter-clockwise rings.
double SignedArea(std::span<const Vec2> polygon);

// Sutherland-Hodgman clipping of `subject` against the convex,
// counter-clockwise polygon `clip`.
std::vector<Vec2> ClipConvexPolygon(std::span<const Vec2> subject,
                                    std::span<const Vec2> clip);

double OrientedBoxIou(const OrientedBox& a, const OrientedBox& b);

}  // namespace mpeval

#endif  // MPEVAL_GEOMETRY_H_
