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

// Static SVG views of a scene with predictions and intent clusters.
//
// Element classes are stable so that output can be inspected mechanically:
// one path.lane per lane, circle.agent per agent, polyline.mode and
// polygon.star per mode, circle.cluster-mean and ellipse.cluster-cov per
// cluster.

#ifndef MPEVAL_RENDER_H_
#define MPEVAL_RENDER_H_

#include <optional>
#include <span>
#include <string>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mpeval/intent.h"
#include "mpeval/scene.h"

namespace mpeval {

struct EllipseAxes {
  double semi_major = 0.0;
  double semi_minor = 0.0;
  // Angle of the dominant eigenvector, in (-pi/2, pi/2].
  double rotation = 0.0;
};

// Semi-axes are n_sigma * sqrt(eigenvalue). NotPSD for asymmetric, negative
// definite or non-finite input.
absl::StatusOr<EllipseAxes> CovarianceEllipse(const Eigen::Matrix2d& sigma,
                                              double n_sigma);

struct RenderStyle {
  std::string av_color = "#d62728";
  std::string focal_color = "#2ca02c";
  std::string agent_color = "#1f77b4";
  std::string gt_color = "#2ca02c";
  std::string mode_color = "#ff7f0e";
  std::string lane_color = "#8c8c8c";
  std::string drivable_color = "#ececec";
  double ellipse_sigma = 2.0;
  int width = 800;
  int height = 800;
  // Pixels per meter.
  double scale = 8.0;
  std::string colormap = "viridis";
  // View center; the focal agent's last observed position when unset.
  std::optional<Vec2> center;
};

absl::Status ValidateRenderStyle(const RenderStyle& style);

// Hex color for t in [0, 1] (clamped).
std::string ColormapHex(absl::string_view colormap, double t);

struct RenderInputs {
  const Scene* scene = nullptr;
  std::span<const PredictionSet> predictions;
  const IntentClusterSet* clusters = nullptr;
  bool draw_ground_truth = true;
};

// CrossSceneMismatch when predictions or clusters belong to another scene.
absl::StatusOr<std::string> RenderScene(const RenderInputs& inputs,
                                        const RenderStyle& style = {});

// "{scene_id}.svg" or "{scene_id}.{experiment}.svg".
std::string SvgFileName(absl::string_view scene_id, absl::string_view experiment = "");

}  // namespace mpeval

#endif  // MPEVAL_RENDER_H_
