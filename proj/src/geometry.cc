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

#include "mpeval/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

double Cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::vector<int> LanesIntersecting(const Scene& scene, const Box2& query) {
  std::vector<int> hits;
  for (std::size_t i = 0; i < scene.lanes.size(); ++i) {
    if (scene.lanes[i].bbox.Intersects(query)) hits.push_back(static_cast<int>(i));
  }
  return hits;
}

}  // namespace

double WrapAngle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

PolylineProjection PointToPolyline(const Vec2& point,
                                   std::span<const Vec2> polyline) {
  PolylineProjection result;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polyline.size(); ++i) {
    const double d_sq = (polyline[i] - point).squaredNorm();
    if (d_sq < best_sq) {
      best_sq = d_sq;
      result.nearest_index = static_cast<int>(i);
    }
  }
  result.distance = std::sqrt(best_sq);
  const std::size_t i = result.nearest_index;
  const Vec2 delta = i + 1 < polyline.size() ? polyline[i + 1] - polyline[i]
                                             : polyline[i] - polyline[i - 1];
  result.local_direction = delta.normalized();
  return result;
}

std::vector<int> LanesWithinRadius(const Scene& scene, const Vec2& point,
                                   double radius) {
  std::vector<int> hits = LanesIntersecting(scene, Box2::Around(point, radius));
  if (hits.empty()) {
    hits = LanesIntersecting(scene, Box2::Around(point, 2.0 * radius));
  }
  return hits;
}

std::optional<double> TryHeadingAtEnd(std::span<const Vec2> trajectory) {
  if (trajectory.size() < 2) return std::nullopt;
  const Vec2& last = trajectory.back();
  for (std::size_t i = trajectory.size() - 1; i-- > 0;) {
    if (trajectory[i] != last) {
      const Vec2 d = last - trajectory[i];
      return WrapAngle(std::atan2(d.y(), d.x()));
    }
  }
  return std::nullopt;
}

double HeadingAtEnd(std::span<const Vec2> trajectory) {
  return TryHeadingAtEnd(trajectory).value_or(0.0);
}

std::optional<double> TryHeadingAtStart(std::span<const Vec2> trajectory) {
  if (trajectory.size() < 2) return std::nullopt;
  const Vec2& first = trajectory.front();
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (trajectory[i] != first) {
      const Vec2 d = trajectory[i] - first;
      return WrapAngle(std::atan2(d.y(), d.x()));
    }
  }
  return std::nullopt;
}

double PathLength(std::span<const Vec2> trajectory) {
  double length = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    length += (trajectory[i] - trajectory[i - 1]).norm();
  }
  return length;
}

bool PointInRing(const Vec2& point, std::span<const Vec2> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y() > point.y()) != (b.y() > point.y())) {
      const double x_cross =
          a.x() + (point.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (point.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

absl::StatusOr<OccupancyGrid> RasterizeRings(std::span<const Polyline> rings,
                                             double resolution) {
  if (!(resolution > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "resolution must be positive");
  }
  if (rings.empty()) {
    return MakeError(ErrorKind::kEmptyDrivableArea, "scene has no drivable rings");
  }
  Box2 bounds;
  for (const Polyline& ring : rings) {
    for (const Vec2& p : ring) bounds.Extend(p);
  }
  OccupancyGrid grid;
  grid.resolution = resolution;
  grid.origin = bounds.min - Vec2(resolution, resolution);
  const Vec2 extent = bounds.max - bounds.min;
  grid.width = static_cast<int>(std::ceil(extent.x() / resolution)) + 2;
  grid.height = static_cast<int>(std::ceil(extent.y() / resolution)) + 2;
  grid.drivable.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);

  std::vector<Box2> ring_boxes;
  ring_boxes.reserve(rings.size());
  for (const Polyline& ring : rings) ring_boxes.push_back(Box2::Of(ring));

  for (int row = 0; row < grid.height; ++row) {
    for (int col = 0; col < grid.width; ++col) {
      const Vec2 center = grid.CellCenter(col, row);
      const Box2 probe{center, center};
      for (std::size_t r = 0; r < rings.size(); ++r) {
        if (ring_boxes[r].Intersects(probe) && PointInRing(center, rings[r])) {
          grid.drivable[static_cast<std::size_t>(row) * grid.width + col] = 1;
          break;
        }
      }
    }
  }
  return grid;
}

absl::StatusOr<OccupancyGrid> RasterizeDrivable(const Scene& scene,
                                                double resolution) {
  return RasterizeRings(scene.drivable_area, resolution);
}

std::array<Vec2, 4> OrientedBox::Corners() const {
  const Vec2 along(std::cos(heading), std::sin(heading));
  const Vec2 across(-along.y(), along.x());
  const Vec2 a = 0.5 * length * along;
  const Vec2 b = 0.5 * width * across;
  return {center - a - b, center + a - b, center + a + b, center - a + b};
}

double SignedArea(std::span<const Vec2> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    twice += Cross(polygon[i], polygon[(i + 1) % n]);
  }
  return 0.5 * twice;
}

std::vector<Vec2> ClipConvexPolygon(std::span<const Vec2> subject,
                                    std::span<const Vec2> clip) {
  std::vector<Vec2> output(subject.begin(), subject.end());
  const std::size_t n = clip.size();
  for (std::size_t e = 0; e < n && !output.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % n];
    const Vec2 edge = b - a;
    std::vector<Vec2> input = std::move(output);
    output.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2& cur = input[i];
      const Vec2& prev = input[(i + input.size() - 1) % input.size()];
      const double s_cur = Cross(edge, cur - a);
      const double s_prev = Cross(edge, prev - a);
      if (s_cur >= 0.0) {
        if (s_prev < 0.0) {
          output.push_back(prev + (cur - prev) * (s_prev / (s_prev - s_cur)));
        }
        output.push_back(cur);
      } else if (s_prev >= 0.0) {
        output.push_back(prev + (cur - prev) * (s_prev / (s_prev - s_cur)));
      }
    }
  }
  return output;
}

double OrientedBoxIou(const OrientedBox& a, const OrientedBox& b) {
  const std::array<Vec2, 4> ca = a.Corners();
  const std::array<Vec2, 4> cb = b.Corners();
  const double area_a = a.length * a.width;
  const double area_b = b.length * b.width;
  const std::vector<Vec2> overlap = ClipConvexPolygon(ca, cb);
  const double inter = overlap.size() < 3 ? 0.0 : std::abs(SignedArea(overlap));
  const double uni = area_a + area_b - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace mpeval
