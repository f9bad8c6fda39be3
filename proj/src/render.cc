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

#include "mpeval/render.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "Eigen/Eigenvalues"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "mpeval/geometry.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

// Samples of matplotlib's viridis at t = 0, 0.125, ..., 1.
constexpr std::array<std::array<double, 3>, 9> kViridis = {{
    {0.267004, 0.004874, 0.329415},
    {0.282623, 0.140926, 0.457517},
    {0.229739, 0.322361, 0.545706},
    {0.172719, 0.448791, 0.557885},
    {0.127568, 0.566949, 0.550556},
    {0.157851, 0.683765, 0.501686},
    {0.369214, 0.788888, 0.382914},
    {0.678489, 0.863742, 0.189503},
    {0.993248, 0.906157, 0.143936},
}};

constexpr std::array<std::array<double, 3>, 2> kGray = {{
    {0.9, 0.9, 0.9},
    {0.1, 0.1, 0.1},
}};

std::string Num(double v) {
  std::string s = absl::StrFormat("%.2f", v);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string Escape(absl::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(const RenderStyle& style, const Vec2& center)
      : style_(style), center_(center) {}

  double X(const Vec2& p) const {
    return style_.width / 2.0 + (p.x() - center_.x()) * style_.scale;
  }
  double Y(const Vec2& p) const {
    return style_.height / 2.0 - (p.y() - center_.y()) * style_.scale;
  }
  std::string Points(std::span<const Vec2> points) const {
    std::string out;
    for (std::size_t i = 0; i < points.size(); ++i) {
      absl::StrAppend(&out, i ? " " : "", Num(X(points[i])), ",", Num(Y(points[i])));
    }
    return out;
  }
  std::string Path(std::span<const Vec2> points) const {
    std::string out;
    for (std::size_t i = 0; i < points.size(); ++i) {
      absl::StrAppend(&out, i ? " L " : "M ", Num(X(points[i])), " ", Num(Y(points[i])));
    }
    return out;
  }
  std::string Star(const Vec2& p, double outer, double inner) const {
    std::string out;
    for (int i = 0; i < 10; ++i) {
      const double r = i % 2 == 0 ? outer : inner;
      const double a = kPi / 2.0 + i * kPi / 5.0;
      absl::StrAppend(&out, i ? " " : "", Num(X(p) + r * std::cos(a)), ",",
                      Num(Y(p) - r * std::sin(a)));
    }
    return out;
  }

 private:
  const RenderStyle& style_;
  Vec2 center_;
};

}  // namespace

absl::StatusOr<EllipseAxes> CovarianceEllipse(const Eigen::Matrix2d& sigma,
                                              double n_sigma) {
  if (!sigma.allFinite() || !(n_sigma > 0.0)) {
    return MakeError(ErrorKind::kNotPsd, "covariance or sigma count is not finite");
  }
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if (std::abs(sigma(0, 1) - sigma(1, 0)) > 1e-9 * scale) {
    return MakeError(ErrorKind::kNotPsd, "covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(sigma);
  const Eigen::Vector2d values = solver.eigenvalues();  // ascending
  if (values[0] < -1e-12 * scale) {
    return MakeError(ErrorKind::kNotPsd,
                     absl::StrCat("covariance has eigenvalue ", values[0]));
  }
  EllipseAxes axes;
  axes.semi_major = n_sigma * std::sqrt(std::max(values[1], 0.0));
  axes.semi_minor = n_sigma * std::sqrt(std::max(values[0], 0.0));
  if (values[1] - values[0] > 1e-12 * scale) {
    const Eigen::Vector2d major = solver.eigenvectors().col(1);
    double angle = std::atan2(major.y(), major.x());
    if (angle <= -kPi / 2.0) angle += kPi;
    if (angle > kPi / 2.0) angle -= kPi;
    axes.rotation = angle;
  }
  return axes;
}

absl::Status ValidateRenderStyle(const RenderStyle& style) {
  if (!(style.scale > 0.0) || !(style.ellipse_sigma > 0.0) || style.width <= 0 ||
      style.height <= 0) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "render scale, sigma count and canvas size must be positive");
  }
  if (style.colormap != "viridis" && style.colormap != "gray") {
    return MakeError(ErrorKind::kInvalidConfig,
                     absl::StrCat("unknown colormap ", style.colormap));
  }
  return absl::OkStatus();
}

std::string ColormapHex(absl::string_view colormap, double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const auto sample = [&](auto const& table) {
    const double pos = t * (table.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                                 table.size() - 2);
    const double f = pos - i;
    std::string out = "#";
    for (int c = 0; c < 3; ++c) {
      const double v = table[i][c] * (1.0 - f) + table[i + 1][c] * f;
      absl::StrAppendFormat(&out, "%02x", static_cast<int>(std::lround(v * 255.0)));
    }
    return out;
  };
  return colormap == "gray" ? sample(kGray) : sample(kViridis);
}

absl::StatusOr<std::string> RenderScene(const RenderInputs& inputs,
                                        const RenderStyle& style) {
  MPEVAL_RETURN_IF_ERROR(ValidateRenderStyle(style));
  if (inputs.scene == nullptr) {
    return MakeError(ErrorKind::kInvalidConfig, "no scene to render");
  }
  const Scene& scene = *inputs.scene;
  for (const PredictionSet& p : inputs.predictions) {
    if (p.scene_id != scene.scene_id) {
      return MakeError(ErrorKind::kCrossSceneMismatch,
                       absl::StrCat("prediction for scene ", p.scene_id,
                                    " rendered with scene ", scene.scene_id));
    }
  }
  if (inputs.clusters != nullptr && inputs.clusters->scene_id != scene.scene_id) {
    return MakeError(ErrorKind::kCrossSceneMismatch,
                     absl::StrCat("clusters for scene ", inputs.clusters->scene_id,
                                  " rendered with scene ", scene.scene_id));
  }
  const AgentTrack* focal = scene.FindAgent(scene.focal_agent);
  const Vec2 center = style.center ? *style.center
                      : focal      ? focal->observed.back().position
                                   : Vec2::Zero();
  const Canvas canvas(style, center);

  std::string svg;
  absl::StrAppend(&svg, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"",
                  style.width, "\" height=\"", style.height, "\" viewBox=\"0 0 ",
                  style.width, " ", style.height, "\">\n");
  absl::StrAppend(&svg, "<title>", Escape(scene.scene_id), "</title>\n");
  absl::StrAppend(&svg,
                  "<defs>\n"
                  "<marker id=\"lane-arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" "
                  "markerWidth=\"4\" markerHeight=\"4\" orient=\"auto\">"
                  "<polygon class=\"arrow-head\" points=\"0,0 10,5 0,10\" fill=\"",
                  style.lane_color, "\"/></marker>\n"
                  "<linearGradient id=\"colorbar-gradient\" x1=\"0\" y1=\"1\" x2=\"0\" "
                  "y2=\"0\">\n");
  for (int i = 0; i <= 10; ++i) {
    absl::StrAppend(&svg, "<stop offset=\"", Num(i / 10.0), "\" stop-color=\"",
                    ColormapHex(style.colormap, i / 10.0), "\"/>\n");
  }
  absl::StrAppend(&svg, "</linearGradient>\n</defs>\n");
  absl::StrAppend(&svg, "<rect class=\"background\" width=\"100%\" height=\"100%\" "
                        "fill=\"#ffffff\"/>\n");

  absl::StrAppend(&svg, "<g id=\"drivable\">\n");
  for (std::size_t i = 0; i < scene.drivable_area.size(); ++i) {
    absl::StrAppend(&svg, "<polygon class=\"drivable\" id=\"drivable-", i,
                    "\" points=\"", canvas.Points(scene.drivable_area[i]),
                    "\" fill=\"", style.drivable_color, "\" stroke=\"none\"/>\n");
  }
  absl::StrAppend(&svg, "</g>\n<g id=\"lanes\">\n");
  for (std::size_t i = 0; i < scene.lanes.size(); ++i) {
    absl::StrAppend(&svg, "<path class=\"lane\" id=\"lane-", i, "\" data-lane=\"",
                    Escape(scene.lanes[i].id), "\" d=\"",
                    canvas.Path(scene.lanes[i].centerline), "\" fill=\"none\" stroke=\"",
                    style.lane_color,
                    "\" stroke-width=\"1\" marker-mid=\"url(#lane-arrow)\" "
                    "marker-end=\"url(#lane-arrow)\"/>\n");
  }
  absl::StrAppend(&svg, "</g>\n<g id=\"agents\">\n");
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    const AgentTrack& agent = scene.agents[i];
    const std::string& color = agent.id == scene.focal_agent ? style.focal_color
                               : scene.av_agent && agent.id == *scene.av_agent
                                   ? style.av_color
                                   : style.agent_color;
    const Vec2& p = agent.observed.back().position;
    absl::StrAppend(&svg, "<circle class=\"agent\" id=\"agent-", i, "\" data-agent=\"",
                    Escape(agent.id), "\" cx=\"", Num(canvas.X(p)), "\" cy=\"",
                    Num(canvas.Y(p)), "\" r=\"4\" fill=\"", color, "\"/>\n");
  }
  absl::StrAppend(&svg, "</g>\n<g id=\"ground-truth\">\n");
  if (inputs.draw_ground_truth && focal != nullptr && !focal->future.empty()) {
    absl::StrAppend(&svg, "<polyline class=\"gt\" points=\"",
                    canvas.Points(focal->FuturePath()), "\" fill=\"none\" stroke=\"",
                    style.gt_color, "\" stroke-width=\"2\"/>\n");
  }
  absl::StrAppend(&svg, "</g>\n<g id=\"modes\">\n");
  for (std::size_t a = 0; a < inputs.predictions.size(); ++a) {
    const PredictionSet& p = inputs.predictions[a];
    for (int k = 0; k < p.num_modes(); ++k) {
      absl::StrAppend(&svg, "<polyline class=\"mode\" id=\"mode-", a, "-", k,
                      "\" points=\"", canvas.Points(p.modes[k]),
                      "\" fill=\"none\" stroke=\"", style.mode_color,
                      "\" stroke-width=\"1.5\" stroke-opacity=\"0.8\"/>\n");
    }
    for (int k = 0; k < p.num_modes(); ++k) {
      absl::StrAppend(&svg, "<polygon class=\"star\" id=\"star-", a, "-", k,
                      "\" points=\"", canvas.Star(p.Goal(k), 6.0, 2.5), "\" fill=\"",
                      style.mode_color, "\"/>\n");
    }
  }
  absl::StrAppend(&svg, "</g>\n<g id=\"clusters\">\n");
  if (inputs.clusters != nullptr) {
    const auto& clusters = inputs.clusters->clusters;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      const IntentCluster& c = clusters[k];
      const std::string color = ColormapHex(style.colormap, c.gamma);
      MPEVAL_ASSIGN_OR_RETURN(const EllipseAxes axes,
                              CovarianceEllipse(c.sigma, style.ellipse_sigma));
      absl::StrAppend(&svg, "<ellipse class=\"cluster-cov\" id=\"cluster-cov-", k,
                      "\" cx=\"0\" cy=\"0\" rx=\"", Num(axes.semi_major * style.scale),
                      "\" ry=\"", Num(axes.semi_minor * style.scale),
                      "\" transform=\"translate(", Num(canvas.X(c.mu)), " ",
                      Num(canvas.Y(c.mu)), ") rotate(",
                      Num(-axes.rotation * 180.0 / kPi), ")\" fill=\"", color,
                      "\" fill-opacity=\"0.3\" stroke=\"", color, "\"/>\n");
      absl::StrAppend(&svg, "<circle class=\"cluster-mean\" id=\"cluster-mean-", k,
                      "\" data-gamma=\"", Num(c.gamma), "\" cx=\"", Num(canvas.X(c.mu)),
                      "\" cy=\"", Num(canvas.Y(c.mu)), "\" r=\"5\" fill=\"", color,
                      "\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n");
    }
  }
  const int bar_x = style.width - 40;
  const int bar_top = 20;
  const int bar_height = std::max(40, style.height / 3);
  absl::StrAppend(&svg, "</g>\n<g id=\"colorbar\">\n",
                  "<rect class=\"colorbar\" x=\"", bar_x, "\" y=\"", bar_top,
                  "\" width=\"12\" height=\"", bar_height,
                  "\" fill=\"url(#colorbar-gradient)\" stroke=\"#000000\" "
                  "stroke-width=\"0.5\"/>\n",
                  "<text x=\"", bar_x + 16, "\" y=\"", bar_top + 4,
                  "\" font-size=\"10\">1.0</text>\n", "<text x=\"", bar_x + 16,
                  "\" y=\"", bar_top + bar_height + 4, "\" font-size=\"10\">0.0</text>\n",
                  "</g>\n</svg>\n");
  return svg;
}

std::string SvgFileName(absl::string_view scene_id, absl::string_view experiment) {
  if (experiment.empty()) return absl::StrCat(scene_id, ".svg");
  return absl::StrCat(scene_id, ".", experiment, ".svg");
}

}  // namespace mpeval
