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

#include "mpeval/accuracy_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "mpeval/geometry.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

absl::Status CheckLengths(const PredictionSet& prediction,
                          std::span<const Vec2> gt) {
  if (prediction.modes.empty()) {
    return MakeError(ErrorKind::kLengthMismatch, "prediction has no modes");
  }
  for (std::size_t k = 0; k < prediction.modes.size(); ++k) {
    if (prediction.modes[k].size() != gt.size() || gt.empty()) {
      return MakeError(ErrorKind::kLengthMismatch,
                       absl::StrCat("mode ", k, " has ",
                                    prediction.modes[k].size(),
                                    " points, ground truth has ", gt.size()));
    }
  }
  return absl::OkStatus();
}

// Per-mode errors over the selected modes, in selection order.
struct ModeErrors {
  std::vector<double> ade;
  std::vector<double> fde;
};

ModeErrors ComputeModeErrors(const PredictionSet& prediction,
                             std::span<const Vec2> gt, const TopK& top) {
  ModeErrors errors;
  for (int mode : top.modes) {
    errors.ade.push_back(AverageDisplacement(prediction.modes[mode], gt));
    errors.fde.push_back(FinalDisplacement(prediction.modes[mode], gt));
  }
  return errors;
}

std::size_t ArgMin(const std::vector<double>& values) {
  return static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
}

double AveragePrecision(std::vector<ScoredPrediction> samples, int num_agents,
                        ApInterpolation interpolation) {
  if (samples.empty() || num_agents == 0) return 0.0;
  // False positives first among equal confidences.
  std::stable_sort(samples.begin(), samples.end(),
                   [](const ScoredPrediction& a, const ScoredPrediction& b) {
                     if (a.confidence != b.confidence) {
                       return a.confidence > b.confidence;
                     }
                     return !a.hit && b.hit;
                   });
  std::vector<double> precision(samples.size());
  std::vector<double> recall(samples.size());
  int true_positives = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    true_positives += samples[i].hit;
    precision[i] = static_cast<double>(true_positives) / (i + 1);
    recall[i] = static_cast<double>(true_positives) / num_agents;
  }

  if (interpolation == ApInterpolation::kElevenPoint) {
    double total = 0.0;
    for (int step = 0; step <= 10; ++step) {
      const double level = step / 10.0;
      double best = 0.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (recall[i] >= level - 1e-12) best = std::max(best, precision[i]);
      }
      total += best;
    }
    return total / 11.0;
  }

  // Area under the monotone upper envelope of the PR curve.
  double area = 0.0;
  std::size_t highest = samples.size() - 1;
  for (std::size_t i = samples.size(); i-- > 0;) {
    if (precision[i] > precision[highest]) {
      area += precision[highest] * (recall[highest] - recall[i]);
      highest = i;
    }
  }
  area += recall[highest] * precision[highest];
  return area;
}

}  // namespace

absl::StatusOr<TopK> NormalizeTopK(
    const std::optional<std::vector<double>>& probabilities, int num_modes,
    int k) {
  if (k < 1 || k > num_modes) {
    return MakeError(ErrorKind::kInvalidConfig,
                     absl::StrCat("k = ", k, " outside [1, ", num_modes, "]"));
  }
  TopK top;
  if (!probabilities) {
    top.modes.resize(k);
    std::iota(top.modes.begin(), top.modes.end(), 0);
    top.probabilities.assign(k, 1.0 / k);
    return top;
  }
  const std::vector<double>& p = *probabilities;
  if (static_cast<int>(p.size()) != num_modes) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "probabilities do not match the number of modes");
  }
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      return MakeError(ErrorKind::kInvalidConfig,
                       "probabilities must be finite and nonnegative");
    }
    total += v;
  }
  if (!(total > 0.0)) {
    return MakeError(ErrorKind::kAllZeroProbabilities,
                     "mode probabilities sum to zero");
  }
  std::vector<int> order(num_modes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&p](int a, int b) { return p[a] > p[b]; });
  top.modes.assign(order.begin(), order.begin() + k);
  double kept = 0.0;
  for (int mode : top.modes) kept += p[mode];
  for (int mode : top.modes) top.probabilities.push_back(p[mode] / kept);
  return top;
}

absl::StatusOr<TopK> NormalizeTopK(const PredictionSet& prediction, int k) {
  return NormalizeTopK(prediction.probabilities, prediction.num_modes(), k);
}

absl::string_view MissDefinitionName(MissDefinition definition) {
  return definition == MissDefinition::kEndpoint ? "endpoint" : "max-pointwise";
}

std::optional<MissDefinition> ParseMissDefinition(absl::string_view name) {
  if (name == "endpoint") return MissDefinition::kEndpoint;
  if (name == "max-pointwise" || name == "max_pointwise") {
    return MissDefinition::kMaxPointwise;
  }
  return std::nullopt;
}

double AverageDisplacement(std::span<const Vec2> mode, std::span<const Vec2> gt) {
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) sum += (mode[t] - gt[t]).norm();
  return sum / static_cast<double>(gt.size());
}

double FinalDisplacement(std::span<const Vec2> mode, std::span<const Vec2> gt) {
  return (mode.back() - gt.back()).norm();
}

double MaxDisplacement(std::span<const Vec2> mode, std::span<const Vec2> gt) {
  double worst = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    worst = std::max(worst, (mode[t] - gt[t]).norm());
  }
  return worst;
}

absl::StatusOr<bool> IsMiss(const PredictionSet& prediction,
                            std::span<const Vec2> gt, int k,
                            const MissCriterion& miss) {
  MPEVAL_RETURN_IF_ERROR(CheckLengths(prediction, gt));
  MPEVAL_ASSIGN_OR_RETURN(const TopK top, NormalizeTopK(prediction, k));
  for (int mode : top.modes) {
    const double error = miss.definition == MissDefinition::kEndpoint
                             ? FinalDisplacement(prediction.modes[mode], gt)
                             : MaxDisplacement(prediction.modes[mode], gt);
    if (error <= miss.threshold) return false;
  }
  return true;
}

absl::StatusOr<AccuracyResult> DisplacementErrors(
    const PredictionSet& prediction, std::span<const Vec2> gt, int k,
    const MissCriterion& miss) {
  MPEVAL_RETURN_IF_ERROR(CheckLengths(prediction, gt));
  MPEVAL_ASSIGN_OR_RETURN(const TopK top, NormalizeTopK(prediction, k));
  const ModeErrors errors = ComputeModeErrors(prediction, gt, top);

  AccuracyResult result;
  const std::size_t best_ade = ArgMin(errors.ade);
  const std::size_t best_fde = ArgMin(errors.fde);
  result.min_ade = errors.ade[best_ade];
  result.min_fde = errors.fde[best_fde];
  result.best_ade_mode = top.modes[best_ade];
  result.best_fde_mode = top.modes[best_fde];
  result.avg_fde = std::accumulate(errors.fde.begin(), errors.fde.end(), 0.0) /
                   static_cast<double>(errors.fde.size());

  const std::optional<double> pred_heading =
      TryHeadingAtEnd(prediction.modes[result.best_fde_mode]);
  const std::optional<double> gt_heading = TryHeadingAtEnd(gt);
  result.degenerate_heading = !pred_heading || !gt_heading;
  result.heading_error =
      WrapAngle(pred_heading.value_or(0.0) - gt_heading.value_or(0.0));

  MPEVAL_ASSIGN_OR_RETURN(result.miss, IsMiss(prediction, gt, k, miss));
  return result;
}

double ProbabilityPenalty(double p) {
  if (!(p > 0.0)) return kMaxProbabilityPenalty;
  return std::min(-std::log(p), kMaxProbabilityPenalty);
}

double BrierPenalty(double p) { return (1.0 - p) * (1.0 - p); }

absl::StatusOr<ProbabilisticResult> ProbabilisticErrors(
    const PredictionSet& prediction, std::span<const Vec2> gt, int k,
    double miss_threshold) {
  MPEVAL_RETURN_IF_ERROR(CheckLengths(prediction, gt));
  MPEVAL_ASSIGN_OR_RETURN(const TopK top, NormalizeTopK(prediction, k));
  const ModeErrors errors = ComputeModeErrors(prediction, gt, top);
  const std::size_t best_ade = ArgMin(errors.ade);
  const std::size_t best_fde = ArgMin(errors.fde);
  const double p_ade = top.probabilities[best_ade];
  const double p_fde = top.probabilities[best_fde];

  ProbabilisticResult result;
  result.best_ade_probability = p_ade;
  result.best_fde_probability = p_fde;
  result.p_min_ade = errors.ade[best_ade] + ProbabilityPenalty(p_ade);
  result.p_min_fde = errors.fde[best_fde] + ProbabilityPenalty(p_fde);
  result.brier_min_ade = errors.ade[best_ade] + BrierPenalty(p_ade);
  result.brier_min_fde = errors.fde[best_fde] + BrierPenalty(p_fde);
  double sum = 0.0;
  for (std::size_t i = 0; i < errors.fde.size(); ++i) {
    sum += errors.fde[i] + ProbabilityPenalty(top.probabilities[i]);
  }
  result.p_avg_fde = sum / static_cast<double>(errors.fde.size());
  result.p_miss = errors.fde[best_fde] <= miss_threshold ? 1.0 - p_fde : 1.0;
  return result;
}

double ScottBandwidth(std::span<const Vec2> samples) {
  const double n = static_cast<double>(samples.size());
  if (samples.size() < 2) return kMinKdeBandwidth;
  Vec2 mean = Vec2::Zero();
  for (const Vec2& s : samples) mean += s;
  mean /= n;
  Vec2 var = Vec2::Zero();
  for (const Vec2& s : samples) var += (s - mean).cwiseAbs2();
  var /= (n - 1.0);
  const double sigma = std::sqrt(0.5 * (var.x() + var.y()));
  return std::max(sigma * std::pow(n, -1.0 / 6.0), kMinKdeBandwidth);
}

absl::StatusOr<double> NllKde(const PredictionSet& prediction,
                              std::span<const Vec2> gt,
                              std::optional<double> bandwidth) {
  MPEVAL_RETURN_IF_ERROR(CheckLengths(prediction, gt));
  if (bandwidth && !(*bandwidth > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "bandwidth must be positive");
  }
  const int num_modes = prediction.num_modes();
  MPEVAL_ASSIGN_OR_RETURN(const TopK all,
                          NormalizeTopK(prediction.probabilities, num_modes,
                                        num_modes));
  std::vector<double> weights(num_modes, 0.0);
  for (std::size_t i = 0; i < all.modes.size(); ++i) {
    weights[all.modes[i]] = all.probabilities[i];
  }

  double total = 0.0;
  std::vector<Vec2> samples(num_modes);
  for (std::size_t t = 0; t < gt.size(); ++t) {
    for (int k = 0; k < num_modes; ++k) samples[k] = prediction.modes[k][t];
    const double h = bandwidth ? *bandwidth : ScottBandwidth(samples);
    const double norm = 1.0 / (2.0 * kPi * h * h);
    double density = 0.0;
    for (int k = 0; k < num_modes; ++k) {
      const double d_sq = (samples[k] - gt[t]).squaredNorm();
      density += weights[k] * norm * std::exp(-0.5 * d_sq / (h * h));
    }
    total += -std::log(std::max(density, kDensityFloor));
  }
  return total / static_cast<double>(gt.size());
}

absl::StatusOr<SceneJointResult> SceneJointErrors(
    std::span<const PredictionSet* const> predictions,
    std::span<const Polyline> gts, int k) {
  if (predictions.empty() || predictions.size() != gts.size()) {
    return MakeError(ErrorKind::kInconsistentModeCounts,
                     "need one ground truth per predicted agent");
  }
  const int num_modes = predictions.front()->num_modes();
  for (const PredictionSet* prediction : predictions) {
    if (prediction->num_modes() != num_modes || prediction->num_modes() < k) {
      return MakeError(ErrorKind::kInconsistentModeCounts,
                       absl::StrCat("agent ", prediction->agent_id, " has ",
                                    prediction->num_modes(), " modes, need ",
                                    num_modes, " and at least k = ", k));
    }
  }
  if (k < 1) return MakeError(ErrorKind::kInvalidConfig, "k must be positive");
  for (std::size_t a = 0; a < predictions.size(); ++a) {
    MPEVAL_RETURN_IF_ERROR(CheckLengths(*predictions[a], gts[a]));
  }

  SceneJointResult result{std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
  const double agents = static_cast<double>(predictions.size());
  for (int j = 0; j < k; ++j) {
    double ade = 0.0;
    double fde = 0.0;
    for (std::size_t a = 0; a < predictions.size(); ++a) {
      ade += AverageDisplacement(predictions[a]->modes[j], gts[a]);
      fde += FinalDisplacement(predictions[a]->modes[j], gts[a]);
    }
    result.scene_min_ade = std::min(result.scene_min_ade, ade / agents);
    result.scene_min_fde = std::min(result.scene_min_fde, fde / agents);
  }
  return result;
}

absl::string_view BehaviorBucketName(BehaviorBucket bucket) {
  switch (bucket) {
    case BehaviorBucket::kStraight: return "straight";
    case BehaviorBucket::kStraightLeft: return "straight-left";
    case BehaviorBucket::kStraightRight: return "straight-right";
    case BehaviorBucket::kLeft: return "left";
    case BehaviorBucket::kRight: return "right";
    case BehaviorBucket::kLeftUTurn: return "left-u-turn";
    case BehaviorBucket::kRightUTurn: return "right-u-turn";
    case BehaviorBucket::kStationary: return "stationary";
  }
  return "straight";
}

std::optional<BehaviorBucket> ParseBehaviorBucket(absl::string_view name) {
  for (int b = 0; b <= static_cast<int>(BehaviorBucket::kStationary); ++b) {
    const auto bucket = static_cast<BehaviorBucket>(b);
    if (BehaviorBucketName(bucket) == name) return bucket;
  }
  return std::nullopt;
}

BehaviorBucket ClassifyBehaviorBucket(std::span<const Vec2> gt,
                                      double horizon_s,
                                      const BucketThresholds& thresholds) {
  const std::optional<double> start = TryHeadingAtStart(gt);
  const std::optional<double> end = TryHeadingAtEnd(gt);
  if (!start || !end || !(horizon_s > 0.0) ||
      PathLength(gt) / horizon_s < thresholds.speed_floor) {
    return BehaviorBucket::kStationary;
  }
  const double turn = WrapAngle(*end - *start) * 180.0 / kPi;
  const double magnitude = std::abs(turn);
  const bool left = turn > 0.0;
  if (magnitude < thresholds.straight_deg) return BehaviorBucket::kStraight;
  if (magnitude < thresholds.slight_turn_deg) {
    return left ? BehaviorBucket::kStraightLeft : BehaviorBucket::kStraightRight;
  }
  if (magnitude < thresholds.turn_deg) {
    return left ? BehaviorBucket::kLeft : BehaviorBucket::kRight;
  }
  return left ? BehaviorBucket::kLeftUTurn : BehaviorBucket::kRightUTurn;
}

absl::StatusOr<MapResult> MeanAveragePrecision(
    std::span<const MapSample> samples, bool soft,
    ApInterpolation interpolation) {
  if (samples.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "no agents to score");
  }
  std::map<BehaviorBucket, std::vector<ScoredPrediction>> pooled;
  std::map<BehaviorBucket, int> agents;
  for (const MapSample& sample : samples) {
    ++agents[sample.bucket];
    std::vector<ScoredPrediction>& bucket = pooled[sample.bucket];
    std::vector<ScoredPrediction> ranked = sample.predictions;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ScoredPrediction& a, const ScoredPrediction& b) {
                       return a.confidence > b.confidence;
                     });
    bool found = false;
    for (const ScoredPrediction& p : ranked) {
      if (p.hit && found) {
        if (!soft) bucket.push_back({p.confidence, false});
        continue;
      }
      bucket.push_back(p);
      found = found || p.hit;
    }
  }

  MapResult result;
  double total = 0.0;
  for (const auto& [bucket, count] : agents) {
    const double ap = AveragePrecision(pooled[bucket], count, interpolation);
    result.bucket_ap[bucket] = ap;
    total += ap;
  }
  result.mean_ap = total / static_cast<double>(agents.size());
  return result;
}

}  // namespace mpeval
