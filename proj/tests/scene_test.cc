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
#include <limits>

#include "gtest/gtest.h"
#include "mpeval/status.h"
#include "tests/fixtures.h"

namespace mpeval {
namespace {

using fixtures::Line;

ErrorKind KindOf(const absl::Status& status) {
  return GetErrorKind(status).value_or(ErrorKind::kSchemaError);
}

TEST(ValidateSceneTest, FixtureIsValid) {
  EXPECT_TRUE(ValidateScene(fixtures::TwoWayRoad()).ok());
}

TEST(ValidateSceneTest, FutureStepsFromHorizon) {
  EXPECT_EQ(fixtures::TwoWayRoad().FutureSteps(), 30);
}

TEST(ValidateSceneTest, SingleWaypointLane) {
  Scene scene = fixtures::TwoWayRoad();
  scene.lanes[0].centerline.resize(1);
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidateSceneTest, RepeatedWaypoint) {
  Scene scene = fixtures::TwoWayRoad();
  scene.lanes[0].centerline[3] = scene.lanes[0].centerline[2];
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidateSceneTest, UnknownLaneReference) {
  Scene scene = fixtures::TwoWayRoad();
  scene.lanes[0].successors.push_back("nowhere");
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidateSceneTest, NonIncreasingTimestamps) {
  Scene scene = fixtures::TwoWayRoad();
  scene.agents[1].observed[4].t = scene.agents[1].observed[3].t;
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidateSceneTest, MissingFocalOrFuture) {
  Scene scene = fixtures::TwoWayRoad();
  scene.focal_agent = "ghost";
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
  scene = fixtures::TwoWayRoad();
  scene.agents[0].future.clear();
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
  scene = fixtures::TwoWayRoad();
  scene.av_agent = "ghost";
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidateSceneTest, NonIntegralHorizon) {
  Scene scene = fixtures::TwoWayRoad();
  scene.horizon_s = 3.05;
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidateSceneTest, NonFiniteCoordinate) {
  Scene scene = fixtures::TwoWayRoad();
  scene.agents[2].observed[0].position.x() = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidateSceneTest, DegenerateDrivableRing) {
  Scene scene = fixtures::TwoWayRoad();
  scene.drivable_area.push_back({{0, 0}, {1, 1}});
  EXPECT_EQ(KindOf(ValidateScene(scene)), ErrorKind::kInvariantViolation);
}

TEST(ValidatePredictionSetTest, Rules) {
  const Scene scene = fixtures::TwoWayRoad();
  PredictionSet p = fixtures::PerfectPrediction(scene, 3);
  EXPECT_TRUE(ValidatePredictionSet(p, 30).ok());
  EXPECT_EQ(KindOf(ValidatePredictionSet(p, 20)), ErrorKind::kLengthMismatch);

  PredictionSet ragged = p;
  ragged.modes[1].pop_back();
  EXPECT_EQ(KindOf(ValidatePredictionSet(ragged)), ErrorKind::kLengthMismatch);

  PredictionSet negative = p;
  (*negative.probabilities)[0] = -0.1;
  EXPECT_EQ(KindOf(ValidatePredictionSet(negative)), ErrorKind::kInvariantViolation);

  PredictionSet short_scores = p;
  short_scores.goal_scores = std::vector<double>{1.0};
  EXPECT_EQ(KindOf(ValidatePredictionSet(short_scores)), ErrorKind::kLengthMismatch);

  PredictionSet empty = p;
  empty.modes.clear();
  EXPECT_EQ(KindOf(ValidatePredictionSet(empty)), ErrorKind::kInvariantViolation);
}

TEST(LaneTest, BoundingBoxFromCenterline) {
  const Lane lane("a", Line({3, -1}, {-2, 4}, 6), {}, {});
  EXPECT_EQ(lane.bbox.min, Vec2(-2, -1));
  EXPECT_EQ(lane.bbox.max, Vec2(3, 4));
  EXPECT_TRUE(lane.bbox.Intersects(Box2::Around({0, 0}, 1)));
  EXPECT_FALSE(lane.bbox.Intersects(Box2::Around({10, 10}, 1)));
}

TEST(AgentCategoryTest, NamesRoundTrip) {
  for (AgentCategory c : {AgentCategory::kVehicle, AgentCategory::kPedestrian,
                          AgentCategory::kCyclist, AgentCategory::kOther}) {
    EXPECT_EQ(ParseAgentCategory(AgentCategoryName(c)), c);
  }
  EXPECT_FALSE(ParseAgentCategory("tank").has_value());
}

TEST(ErrorKindTest, PayloadSurvivesCopy) {
  const absl::Status status = MakeError(ErrorKind::kNoLanes, "scene s");
  const absl::Status copy = status;
  EXPECT_EQ(GetErrorKind(copy), ErrorKind::kNoLanes);
  EXPECT_FALSE(GetErrorKind(absl::InternalError("x")).has_value());
}

}  // namespace
}  // namespace mpeval
