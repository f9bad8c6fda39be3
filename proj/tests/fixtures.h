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

// Scene builders and seeded generators shared by the tests.

#ifndef MPEVAL_TESTS_FIXTURES_H_
#define MPEVAL_TESTS_FIXTURES_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "mpeval/geometry.h"
#include "mpeval/scene.h"

namespace mpeval::fixtures {

// `n` >= 2 evenly spaced points from `a` to `b`, both included.
inline Polyline Line(const Vec2& a, const Vec2& b, int n) {
  Polyline out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * (static_cast<double>(i) / (n - 1)));
  return out;
}

inline Vec2 Rotate(const Vec2& p, double angle) {
  return Vec2(std::cos(angle) * p.x() - std::sin(angle) * p.y(),
              std::sin(angle) * p.x() + std::cos(angle) * p.y());
}

inline std::vector<TimedPoint> Timed(const Polyline& points, double t0, double dt) {
  std::vector<TimedPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back({t0 + dt * static_cast<double>(i), points[i]});
  }
  return out;
}

inline AgentTrack MakeAgent(const std::string& id, const Polyline& observed,
                            const Polyline& future, double hz = 10.0) {
  AgentTrack agent;
  agent.id = id;
  agent.dims = AgentDims{4.7, 2.0};
  const double dt = 1.0 / hz;
  agent.observed = Timed(observed, -dt * static_cast<double>(observed.size() - 1), dt);
  agent.future = Timed(future, dt, dt);
  return agent;
}

// A two-way road along x: lane "east" at y = 0 heading +x, lane "west" at
// y = 4 heading -x, drivable rectangle around both. The focal agent drives
// east at 10 m/s through the origin; "car1" drives west and "av" follows the
// focal agent.
inline Scene TwoWayRoad(const std::string& id = "road") {
  Scene scene;
  scene.scene_id = id;
  scene.frequency_hz = 10.0;
  scene.history_s = 2.0;
  scene.horizon_s = 3.0;
  scene.focal_agent = "focal";
  scene.av_agent = "av";
  scene.lanes.emplace_back("east", Line({-60, 0}, {60, 0}, 121),
                           std::vector<std::string>{}, std::vector<std::string>{});
  scene.lanes.emplace_back("west", Line({60, 4}, {-60, 4}, 121),
                           std::vector<std::string>{}, std::vector<std::string>{});
  scene.drivable_area = {{{-60, -2}, {60, -2}, {60, 6}, {-60, 6}}};
  scene.agents.push_back(MakeAgent("focal", Line({-19, 0}, {0, 0}, 20),
                                   Line({1, 0}, {30, 0}, 30)));
  scene.agents.push_back(MakeAgent("car1", Line({40, 4}, {21, 4}, 20),
                                   Line({20, 4}, {-9, 4}, 30)));
  scene.agents.push_back(MakeAgent("av", Line({-39, 0}, {-20, 0}, 20),
                                   Line({-19, 0}, {10, 0}, 30)));
  return scene;
}

// K copies of the focal ground truth with uniform probabilities.
inline PredictionSet PerfectPrediction(const Scene& scene, int num_modes,
                                       const std::string& agent = "") {
  const AgentTrack* track = scene.FindAgent(agent.empty() ? scene.focal_agent : agent);
  PredictionSet p;
  p.scene_id = scene.scene_id;
  p.agent_id = track->id;
  p.modes.assign(num_modes, track->FuturePath());
  p.probabilities = std::vector<double>(num_modes, 1.0 / num_modes);
  return p;
}

// Straight-line mode from `from` whose last segment points along `direction`
// and ends at `goal`.
inline Polyline ModeTo(const Vec2& from, const Vec2& goal, const Vec2& direction,
                       int steps) {
  const Vec2 before = goal - direction.normalized();
  Polyline mode = steps > 2 ? Line(from + (before - from) / (steps - 1), before, steps - 1)
                            : Polyline{before};
  mode.push_back(goal);
  return mode;
}

// Random displacement-metric instance: a ground truth and K noisy modes.
struct MetricInstance {
  PredictionSet prediction;
  Polyline gt;
  int k = 1;
};

inline MetricInstance RandomMetricInstance(std::mt19937_64& rng, int max_modes = 12,
                                           int max_steps = 60) {
  std::uniform_int_distribution<int> modes_dist(1, max_modes);
  std::uniform_int_distribution<int> steps_dist(1, max_steps);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  MetricInstance inst;
  const int num_modes = modes_dist(rng);
  const int steps = steps_dist(rng);
  Vec2 p(normal(rng) * 10.0, normal(rng) * 10.0);
  Vec2 v(normal(rng), normal(rng));
  for (int t = 0; t < steps; ++t) {
    v += 0.2 * Vec2(normal(rng), normal(rng));
    p += v;
    inst.gt.push_back(p);
  }
  inst.prediction.scene_id = "fuzz";
  inst.prediction.agent_id = "a";
  for (int k = 0; k < num_modes; ++k) {
    const double spread = 4.0 * unit(rng);
    Polyline mode;
    Vec2 drift = Vec2::Zero();
    for (const Vec2& g : inst.gt) {
      drift += spread * 0.3 * Vec2(normal(rng), normal(rng));
      mode.push_back(g + drift);
    }
    inst.prediction.modes.push_back(std::move(mode));
  }
  if (unit(rng) < 0.8) {
    std::vector<double> probs(num_modes);
    for (double& x : probs) x = unit(rng) < 0.15 ? 0.0 : unit(rng);
    probs[std::uniform_int_distribution<int>(0, num_modes - 1)(rng)] += 0.01;
    inst.prediction.probabilities = probs;
  }
  inst.k = std::uniform_int_distribution<int>(1, num_modes)(rng);
  return inst;
}

// Random road network for clustering: parallel straight lanes at 4 m
// spacing with random travel directions, some split into successor chains,
// all rotated by a random angle. The focal agent stands near the middle of
// lane 0. Goals sit within 1.2 m of a randomly chosen lane and point along
// it; a few goals are placed off the road or against the traffic.
struct ClusterFixture {
  Scene scene;
  PredictionSet prediction;
};

inline ClusterFixture RandomClusterFixture(std::mt19937_64& rng, int index,
                                           int num_goals = 12, int steps = 30) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rotation = 2.0 * kPi * unit(rng);
  const Vec2 offset(200.0 * unit(rng) - 100.0, 200.0 * unit(rng) - 100.0);
  const auto place = [&](const Vec2& p) -> Vec2 { return Rotate(p, rotation) + offset; };
  const Vec2 east = Rotate(Vec2::UnitX(), rotation);

  ClusterFixture f;
  Scene& scene = f.scene;
  scene.scene_id = absl::StrCat("fuzz-", index);
  scene.frequency_hz = 10.0;
  scene.history_s = 1.0;
  scene.horizon_s = steps / 10.0;
  scene.focal_agent = "focal";

  const int num_rows = 1 + std::uniform_int_distribution<int>(1, 4)(rng);
  struct Segment {
    int lane;
    double x0, x1, y;
    bool eastbound;
  };
  std::vector<Segment> segments;
  for (int row = 0; row < num_rows; ++row) {
    const double y = 4.0 * row;
    const bool eastbound = row == 0 || unit(rng) < 0.5;
    const bool split = unit(rng) < 0.5;
    const std::vector<std::pair<double, double>> spans =
        split ? std::vector<std::pair<double, double>>{{-40, 10}, {10, 60}}
              : std::vector<std::pair<double, double>>{{-40, 60}};
    std::vector<int> chain;
    for (const auto& [a, b] : spans) {
      const double from = eastbound ? a : b;
      const double to = eastbound ? b : a;
      const int n = static_cast<int>(std::abs(b - a)) + 1;
      Polyline centerline;
      for (const Vec2& p : Line({from, y}, {to, y}, n)) centerline.push_back(place(p));
      chain.push_back(static_cast<int>(scene.lanes.size()));
      scene.lanes.emplace_back(absl::StrCat("lane-", row, "-", chain.size()),
                               std::move(centerline), std::vector<std::string>{},
                               std::vector<std::string>{});
      segments.push_back({chain.back(), a, b, y, eastbound});
    }
    if (chain.size() == 2) {
      // Travel order decides which segment leads into the other.
      const int first = eastbound ? chain[0] : chain[1];
      const int second = eastbound ? chain[1] : chain[0];
      scene.lanes[first].successors.push_back(scene.lanes[second].id);
    }
  }
  const double top = 4.0 * (num_rows - 1);
  scene.drivable_area = {{place({-40, -2}), place({60, -2}), place({60, top + 2}),
                          place({-40, top + 2})}};
  const Vec2 start = place({0.0, 0.0});
  scene.agents.push_back(MakeAgent("focal", Line(start - 9.0 * east, start, 10),
                                   Line(start + east, start + steps * east, steps)));

  PredictionSet& p = f.prediction;
  p.scene_id = scene.scene_id;
  p.agent_id = "focal";
  std::vector<double> scores;
  for (int n = 0; n < num_goals; ++n) {
    const Segment& s = segments[std::uniform_int_distribution<std::size_t>(
        0, segments.size() - 1)(rng)];
    const double x = s.x0 + 2.0 + (s.x1 - s.x0 - 4.0) * unit(rng);
    double y = s.y + 2.4 * unit(rng) - 1.2;
    Vec2 direction = s.eastbound ? east : -east;
    const double kind = unit(rng);
    if (kind < 0.08) {
      y = top + 6.0 + 10.0 * unit(rng);  // off the road
    } else if (kind < 0.16) {
      direction = -direction;  // against the traffic
    }
    p.modes.push_back(ModeTo(start, place({x, y}), direction, steps));
    scores.push_back(unit(rng));
  }
  p.goal_scores = scores;
  p.probabilities = std::vector<double>(num_goals, 1.0 / num_goals);
  return f;
}

// Minimal XML well-formedness check: balanced, properly nested tags with
// quoted attributes. Enough for the renderer's output.
inline bool WellFormedXml(absl::string_view xml, std::string* error = nullptr) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  int roots = 0;
  const auto fail = [&](const std::string& why) {
    if (error) *error = absl::StrCat(why, " at offset ", i);
    return false;
  };
  while (i < xml.size()) {
    if (xml[i] != '<') {
      if (xml[i] == '&') {
        const std::size_t semi = xml.find(';', i);
        if (semi == absl::string_view::npos) return fail("bare ampersand");
      }
      if (stack.empty() && !std::isspace(static_cast<unsigned char>(xml[i]))) {
        return fail("text outside the root element");
      }
      ++i;
      continue;
    }
    const std::size_t close = xml.find('>', i);
    if (close == absl::string_view::npos) return fail("unterminated tag");
    absl::string_view tag = xml.substr(i + 1, close - i - 1);
    if (tag.empty()) return fail("empty tag");
    if (tag.front() == '?' || tag.front() == '!') {
      i = close + 1;
      continue;
    }
    int quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2 != 0) return fail("unbalanced quotes");
    if (tag.front() == '/') {
      const std::string name(tag.substr(1));
      if (stack.empty() || stack.back() != name) return fail("mismatched closing tag");
      stack.pop_back();
    } else {
      const bool self_closing = tag.back() == '/';
      const std::size_t end = tag.find_first_of(" \t\n/");
      const std::string name(tag.substr(0, end));
      if (stack.empty()) ++roots;
      if (!self_closing) stack.push_back(name);
    }
    i = close + 1;
  }
  if (!stack.empty()) return fail("unclosed element " + stack.back());
  if (roots != 1) return fail("expected one root element");
  return true;
}

inline int CountOccurrences(absl::string_view text, absl::string_view needle) {
  int count = 0;
  for (std::size_t pos = text.find(needle); pos != absl::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace mpeval::fixtures

#endif  // MPEVAL_TESTS_FIXTURES_H_
