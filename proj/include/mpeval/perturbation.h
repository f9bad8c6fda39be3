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

// Simulated perception failures. Every keep/drop decision is a pure function
// of (seed, scene id, target, element id), so the same elements are masked no
// matter how scenes are ordered, batched or spread over threads.

#ifndef MPEVAL_PERTURBATION_H_
#define MPEVAL_PERTURBATION_H_

#include <cstdint>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"
#include "mpeval/scene.h"

namespace mpeval {

enum class PerturbTarget {
  kLanes,
  // Whole non-focal agents.
  kAgents,
  // Observed frames of agents that come within the interaction radius.
  kFramesInteracting,
  kAllAgentsRemoved,
};

// CLI spellings: lanes, agents, frames, no-agents.
absl::string_view PerturbTargetName(PerturbTarget target);
std::optional<PerturbTarget> ParsePerturbTarget(absl::string_view name);

struct PerturbationSpec {
  PerturbTarget target = PerturbTarget::kLanes;
  // Keep probability for lanes and agents.
  double recall = 1.0;
  // Keep probability per observed frame, frames mode only.
  double detect_prob = 0.5;
  double interaction_radius = 20.0;
  std::uint64_t seed = 0;

  // Short stable label, e.g. "lanes-recall90" or "frames-detect50".
  std::string Label() const;
};

absl::Status ValidatePerturbationSpec(const PerturbationSpec& spec);

// Uniform draw in [0, 1) keyed by the four components.
double KeyedUniform(std::uint64_t seed, absl::string_view scene_id,
                    PerturbTarget target, absl::string_view element_id);

// Returns a masked copy of `scene`. The focal agent is never touched; lane
// references to removed lanes are pruned so the result is a valid scene.
Scene Perturb(const Scene& scene, const PerturbationSpec& spec);

}  // namespace mpeval

#endif  // MPEVAL_PERTURBATION_H_
