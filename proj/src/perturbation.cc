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

#include "mpeval/perturbation.h"

#include <cmath>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over a length-prefixed field, so ("ab","c") and ("a","bc") differ.
std::uint64_t MixField(std::uint64_t h, absl::string_view field) {
  const std::uint64_t size = field.size();
  for (int i = 0; i < 8; ++i) {
    h = (h ^ ((size >> (8 * i)) & 0xff)) * kFnvPrime;
  }
  for (unsigned char c : field) h = (h ^ c) * kFnvPrime;
  return h;
}

std::string PercentLabel(double p) {
  return absl::StrFormat("%g", std::round(p * 1000.0) / 10.0);
}

// Observed position of `track` closest in time to `t`.
const Vec2& PositionNear(const AgentTrack& track, double t) {
  const TimedPoint* best = &track.observed.front();
  for (const TimedPoint& s : track.observed) {
    if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
  }
  return best->position;
}

bool Interacts(const AgentTrack& agent, const AgentTrack& focal, double radius) {
  for (const TimedPoint& s : agent.observed) {
    if ((s.position - PositionNear(focal, s.t)).norm() <= radius) return true;
  }
  return false;
}

void PruneLaneReferences(std::vector<Lane>& lanes) {
  std::unordered_set<std::string> kept;
  for (const Lane& lane : lanes) kept.insert(lane.id);
  for (Lane& lane : lanes) {
    std::erase_if(lane.successors, [&](const std::string& id) { return !kept.contains(id); });
    std::erase_if(lane.merges_with, [&](const std::string& id) { return !kept.contains(id); });
  }
}

}  // namespace

absl::string_view PerturbTargetName(PerturbTarget target) {
  switch (target) {
    case PerturbTarget::kLanes: return "lanes";
    case PerturbTarget::kAgents: return "agents";
    case PerturbTarget::kFramesInteracting: return "frames";
    case PerturbTarget::kAllAgentsRemoved: return "no-agents";
  }
  return "lanes";
}

std::optional<PerturbTarget> ParsePerturbTarget(absl::string_view name) {
  if (name == "lanes") return PerturbTarget::kLanes;
  if (name == "agents") return PerturbTarget::kAgents;
  if (name == "frames") return PerturbTarget::kFramesInteracting;
  if (name == "no-agents") return PerturbTarget::kAllAgentsRemoved;
  return std::nullopt;
}

std::string PerturbationSpec::Label() const {
  switch (target) {
    case PerturbTarget::kLanes:
    case PerturbTarget::kAgents:
      return absl::StrCat(PerturbTargetName(target), "-recall", PercentLabel(recall));
    case PerturbTarget::kFramesInteracting:
      return absl::StrCat("frames-detect", PercentLabel(detect_prob));
    case PerturbTarget::kAllAgentsRemoved:
      return "no-agents";
  }
  return "unknown";
}

absl::Status ValidatePerturbationSpec(const PerturbationSpec& spec) {
  if (!(spec.recall > 0.0 && spec.recall <= 1.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "recall must be in (0, 1]");
  }
  if (!(spec.detect_prob > 0.0 && spec.detect_prob <= 1.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "detect_prob must be in (0, 1]");
  }
  if (!(spec.interaction_radius > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "interaction_radius must be positive");
  }
  return absl::OkStatus();
}

double KeyedUniform(std::uint64_t seed, absl::string_view scene_id,
                    PerturbTarget target, absl::string_view element_id) {
  std::uint64_t h = kFnvOffset;
  h = MixField(h, scene_id);
  h = MixField(h, PerturbTargetName(target));
  h = MixField(h, element_id);
  const std::uint64_t bits = SplitMix64(SplitMix64(seed) ^ h);
  // Top 53 bits as a double in [0, 1).
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Scene Perturb(const Scene& scene, const PerturbationSpec& spec) {
  Scene out = scene;
  const auto keep = [&](absl::string_view element, double p) {
    return KeyedUniform(spec.seed, scene.scene_id, spec.target, element) < p;
  };
  switch (spec.target) {
    case PerturbTarget::kLanes: {
      std::erase_if(out.lanes, [&](const Lane& lane) { return !keep(lane.id, spec.recall); });
      PruneLaneReferences(out.lanes);
      break;
    }
    case PerturbTarget::kAgents:
      std::erase_if(out.agents, [&](const AgentTrack& agent) {
        return agent.id != scene.focal_agent && !keep(agent.id, spec.recall);
      });
      break;
    case PerturbTarget::kFramesInteracting: {
      const AgentTrack& focal = scene.Focal();
      for (AgentTrack& agent : out.agents) {
        if (agent.id == scene.focal_agent ||
            !Interacts(agent, focal, spec.interaction_radius)) {
          continue;
        }
        std::vector<TimedPoint> frames;
        for (std::size_t i = 0; i < agent.observed.size(); ++i) {
          if (keep(absl::StrCat(agent.id, "#", i), spec.detect_prob)) {
            frames.push_back(agent.observed[i]);
          }
        }
        agent.observed = std::move(frames);
      }
      std::erase_if(out.agents, [](const AgentTrack& agent) { return agent.observed.empty(); });
      break;
    }
    case PerturbTarget::kAllAgentsRemoved:
      std::erase_if(out.agents, [&](const AgentTrack& agent) {
        return agent.id != scene.focal_agent;
      });
      break;
  }
  if (out.av_agent && out.FindAgent(*out.av_agent) == nullptr) {
    out.av_agent.reset();
  }
  return out;
}

}  // namespace mpeval
