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

#include "mpeval/evaluate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "mpeval/geometry.h"
#include "mpeval/parallel.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

using Json = nlohmann::json;

// Groups whose keys are repeated with a "_<k>" suffix for every extra cutoff.
constexpr const char* kPerCutoffGroups[] = {"accuracy", "probabilistic", "spread"};

absl::string_view InterpolationName(ApInterpolation interpolation) {
  return interpolation == ApInterpolation::kElevenPoint ? "11-point" : "all-point";
}

std::optional<ApInterpolation> ParseInterpolation(absl::string_view name) {
  if (name == "all-point") return ApInterpolation::kAllPoint;
  if (name == "11-point") return ApInterpolation::kElevenPoint;
  return std::nullopt;
}

std::string Suffixed(absl::string_view key, std::optional<int> cutoff) {
  return cutoff ? absl::StrCat(key, "_", *cutoff) : std::string(key);
}

PredictionSet FirstK(const PredictionSet& prediction, int k) {
  PredictionSet out = prediction;
  const int keep = std::min(k, prediction.num_modes());
  out.modes.resize(keep);
  if (out.probabilities) out.probabilities->resize(keep);
  if (out.goal_scores) out.goal_scores->resize(keep);
  return out;
}

std::string AgentKey(absl::string_view scene_id, absl::string_view agent_id) {
  return absl::StrCat(scene_id.size(), ":", scene_id, agent_id);
}

struct SceneInputs {
  const Scene* scene = nullptr;
  const PredictionSet* focal = nullptr;
  // Every prediction in the scene, focal first, then by agent id.
  std::vector<const PredictionSet*> agents;
};

class SceneEvaluator {
 public:
  SceneEvaluator(const EvalConfig& config, const std::set<std::string>& selected)
      : config_(config), selected_(selected) {}

  SceneRecord Run(const SceneInputs& in, absl::string_view experiment,
                  std::optional<MapSample>* sample) const {
    const Scene& scene = *in.scene;
    SceneRecord record;
    record.scene_id = scene.scene_id;
    record.agent_id = scene.focal_agent;
    record.experiment = std::string(experiment);
    if (in.focal == nullptr) {
      record.failures["prediction"] = "missing prediction for the focal agent";
      return record;
    }
    const PredictionSet& pred = *in.focal;
    const Polyline gt = scene.Focal().FuturePath();
    if (pred.horizon() != static_cast<int>(gt.size())) {
      record.failures["prediction"] =
          absl::StrCat(ErrorKindName(ErrorKind::kLengthMismatch), ": modes have ",
                       pred.horizon(), " points, ground truth has ", gt.size());
      return record;
    }
    const int k = std::min(config_.k, pred.num_modes());
    if (k < config_.k) record.flags.push_back("fewer_modes_than_k");
    const absl::StatusOr<PredictionSet> topk = SelectTopK(pred, k);
    if (!topk.ok()) {
      record.failures["prediction"] = std::string(topk.status().message());
      return record;
    }

    Cutoff(record, pred, gt, k, std::nullopt);
    for (int extra : config_.extra_k) {
      Cutoff(record, pred, gt, std::min(extra, pred.num_modes()), extra);
    }

    if (Wants("nll")) {
      Put(record, "nll", NllKde(*topk, gt, config_.kde_bandwidth),
          [&](double nll) { Emit(record, "NLL", nll); });
    }
    if (Wants("lateral")) {
      Put(record, "lateral", ComputeLateralDiversity(*topk, scene, gt, config_.lateral),
          [&](const LateralDiversity& d) {
            Emit(record, "lanes_reached", d.lanes_reached);
            Emit(record, "yaw_variance", d.yaw_variance);
            if (d.min_lane_fde) Emit(record, "min_lane_fde", *d.min_lane_fde);
          });
    }
    if (Wants("longitudinal")) {
      Put(record, "longitudinal",
          ComputeLongitudinalDiversity(*topk, scene.frequency_hz),
          [&](const LongitudinalDiversity& d) {
            Emit(record, "speed_variance", d.speed_variance);
            if (d.accel_variance) Emit(record, "accel_variance", *d.accel_variance);
          });
    }
    if (Wants("drivable")) {
      Put(record, "drivable", RasterizeDrivable(scene, config_.dao_resolution),
          [&](const OccupancyGrid& grid) {
            const DrivableCompliance d = ComputeDrivableCompliance(*topk, grid);
            Emit(record, "off_road_rate", d.off_road_rate);
            Emit(record, "DAC", d.dac);
            Emit(record, "DAO", d.dao);
          });
    }
    if (Wants("oncoming")) {
      Emit(record, "OTD", OncomingTrafficRatio(*topk, scene, config_.oncoming));
    }
    if (Wants("social")) Social(record, in, k);
    if (Wants("scene")) Joint(record, in, k);

    const BehaviorBucket bucket =
        ClassifyBehaviorBucket(gt, scene.horizon_s, config_.buckets);
    record.annotations["bucket"] = std::string(BehaviorBucketName(bucket));
    if (Wants("map")) {
      MapSample s;
      s.bucket = bucket;
      for (std::size_t i = 0; i < topk->modes.size(); ++i) {
        const Polyline& mode = topk->modes[i];
        const double error = config_.miss.definition == MissDefinition::kEndpoint
                                 ? FinalDisplacement(mode, gt)
                                 : MaxDisplacement(mode, gt);
        s.predictions.push_back(
            {(*topk->probabilities)[i], error <= config_.miss.threshold});
      }
      *sample = std::move(s);
    }
    std::sort(record.flags.begin(), record.flags.end());
    record.flags.erase(std::unique(record.flags.begin(), record.flags.end()),
                       record.flags.end());
    return record;
  }

 private:
  bool Wants(absl::string_view group) const {
    for (const std::string& key : MetricGroups().at(std::string(group))) {
      if (selected_.contains(key)) return true;
    }
    return false;
  }

  bool WantsAt(absl::string_view group, std::optional<int> cutoff) const {
    for (const std::string& key : MetricGroups().at(std::string(group))) {
      if (selected_.contains(Suffixed(key, cutoff))) return true;
    }
    return false;
  }

  void Emit(SceneRecord& record, const std::string& key, double value) const {
    if (selected_.contains(key)) record.metrics[key] = value;
  }

  template <typename T, typename Fn>
  static void Put(SceneRecord& record, const std::string& group,
                  const absl::StatusOr<T>& result, Fn&& fn) {
    if (result.ok()) {
      fn(*result);
    } else {
      record.failures[group] = std::string(result.status().message());
    }
  }

  void Cutoff(SceneRecord& record, const PredictionSet& pred, const Polyline& gt,
              int k, std::optional<int> cutoff) const {
    const auto key = [&](absl::string_view base) { return Suffixed(base, cutoff); };
    const auto group = [&](absl::string_view base) { return Suffixed(base, cutoff); };
    const bool spread = WantsAt("spread", cutoff);
    std::optional<AccuracyResult> acc;
    std::optional<ProbabilisticResult> prob;
    if (WantsAt("accuracy", cutoff) || spread) {
      Put(record, group("accuracy"), DisplacementErrors(pred, gt, k, config_.miss),
          [&](const AccuracyResult& r) {
            acc = r;
            Emit(record, key("minADE"), r.min_ade);
            Emit(record, key("minFDE"), r.min_fde);
            Emit(record, key("avgFDE"), r.avg_fde);
            Emit(record, key("MR"), r.miss ? 1.0 : 0.0);
            Emit(record, key("heading_error"), r.heading_error);
            if (r.degenerate_heading && !cutoff) {
              record.flags.push_back("degenerate_heading");
            }
          });
    }
    if (WantsAt("probabilistic", cutoff) || spread) {
      Put(record, group("probabilistic"),
          ProbabilisticErrors(pred, gt, k, config_.miss.threshold),
          [&](const ProbabilisticResult& r) {
            prob = r;
            Emit(record, key("p_minADE"), r.p_min_ade);
            Emit(record, key("p_minFDE"), r.p_min_fde);
            Emit(record, key("p_avgFDE"), r.p_avg_fde);
            Emit(record, key("brier_minADE"), r.brier_min_ade);
            Emit(record, key("brier_minFDE"), r.brier_min_fde);
            Emit(record, key("p_MR"), r.p_miss);
          });
    }
    if (spread) {
      const double inf = std::numeric_limits<double>::infinity();
      if (acc) {
        const SpreadRatio rf = Rf(acc->avg_fde, acc->min_fde);
        Emit(record, key("RF"), rf.infinite ? inf : rf.value);
        if (rf.infinite) record.flags.push_back(key("rf_infinite"));
      }
      if (prob) {
        const SpreadRatio prf = PRf(prob->p_avg_fde, prob->p_min_fde);
        Emit(record, key("p_RF"), prf.infinite ? inf : prf.value);
        if (prf.infinite) record.flags.push_back(key("p_rf_infinite"));
      }
    }
  }

  void Social(SceneRecord& record, const SceneInputs& in, int k) const {
    std::vector<PredictionSet> preds;
    std::vector<AgentDims> dims;
    for (const PredictionSet* p : in.agents) {
      const AgentTrack* agent = in.scene->FindAgent(p->agent_id);
      if (agent->dims) {
        dims.push_back(*agent->dims);
      } else if (config_.default_dims) {
        dims.push_back(kDefaultVehicleDims);
      } else {
        record.failures["social"] =
            absl::StrCat(ErrorKindName(ErrorKind::kMissingDims), ": agent ",
                         agent->id, " has no dims");
        return;
      }
      preds.push_back(FirstK(*p, k));
    }
    Put(record, "social",
        ComputeSocialConsistency(preds, dims, config_.scr_iou_threshold),
        [&](const SocialConsistency& s) {
          Emit(record, "SCR", s.scr);
          Emit(record, "overlap_rate", s.overlap_rate);
        });
  }

  void Joint(SceneRecord& record, const SceneInputs& in, int k) const {
    std::vector<const PredictionSet*> preds;
    std::vector<Polyline> gts;
    for (const PredictionSet* p : in.agents) {
      Polyline gt = in.scene->FindAgent(p->agent_id)->FuturePath();
      // Agents without a matching ground-truth horizon cannot be scored.
      if (static_cast<int>(gt.size()) != p->horizon()) continue;
      preds.push_back(p);
      gts.push_back(std::move(gt));
    }
    Put(record, "scene", SceneJointErrors(preds, gts, k),
        [&](const SceneJointResult& r) {
          Emit(record, "scene_minADE", r.scene_min_ade);
          Emit(record, "scene_minFDE", r.scene_min_fde);
        });
  }

  const EvalConfig& config_;
  const std::set<std::string>& selected_;
};

template <typename T>
absl::Status Read(const Json& json, const char* key, T& out) {
  const auto it = json.find(key);
  if (it == json.end()) return absl::OkStatus();
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    return MakeError(ErrorKind::kInvalidConfig,
                     absl::StrCat("config field ", key, " has the wrong type"));
  }
  return absl::OkStatus();
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& MetricGroups() {
  static const auto* groups = new std::map<std::string, std::vector<std::string>>{
      {"accuracy", {"minADE", "minFDE", "avgFDE", "MR", "heading_error"}},
      {"probabilistic",
       {"p_minADE", "p_minFDE", "p_avgFDE", "brier_minADE", "brier_minFDE", "p_MR"}},
      {"nll", {"NLL"}},
      {"spread", {"RF", "p_RF"}},
      {"lateral", {"lanes_reached", "yaw_variance", "min_lane_fde"}},
      {"longitudinal", {"speed_variance", "accel_variance"}},
      {"drivable", {"off_road_rate", "DAC", "DAO"}},
      {"social", {"SCR", "overlap_rate"}},
      {"oncoming", {"OTD"}},
      {"scene", {"scene_minADE", "scene_minFDE"}},
      {"map", {"mAP", "soft_mAP"}},
  };
  return *groups;
}

absl::StatusOr<EvalConfig> PresetConfig(absl::string_view name) {
  EvalConfig config;
  if (name == "argoverse") {
    config.preset = "argoverse";
    config.k = 6;
    config.miss.definition = MissDefinition::kEndpoint;
    config.headline = "brier_minFDE";
    return config;
  }
  if (name == "nuscenes") {
    config.preset = "nuscenes";
    config.k = 5;
    config.extra_k = {10};
    config.miss.definition = MissDefinition::kMaxPointwise;
    config.headline = "minADE";
    return config;
  }
  return MakeError(ErrorKind::kInvalidConfig,
                   absl::StrCat("unknown preset '", name, "'"));
}

absl::Status ValidateEvalConfig(const EvalConfig& config) {
  if (config.k < 1) return MakeError(ErrorKind::kInvalidConfig, "k must be >= 1");
  for (int k : config.extra_k) {
    if (k < 1 || k == config.k) {
      return MakeError(ErrorKind::kInvalidConfig,
                       "extra cutoffs must be >= 1 and differ from k");
    }
  }
  if (!(config.miss.threshold > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "miss threshold must be positive");
  }
  if (!(config.dao_resolution > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "DAO resolution must be positive");
  }
  if (!(config.scr_iou_threshold >= 0.0 && config.scr_iou_threshold < 1.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "SCR IoU threshold must be in [0, 1)");
  }
  if (config.kde_bandwidth && !(*config.kde_bandwidth > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "KDE bandwidth must be positive");
  }
  if (!(config.lateral.assign_threshold > 0.0 && config.lateral.candidate_radius > 0.0 &&
        config.oncoming.lane_threshold > 0.0)) {
    return MakeError(ErrorKind::kInvalidConfig, "lane thresholds must be positive");
  }
  if (config.jobs < 1) return MakeError(ErrorKind::kInvalidConfig, "jobs must be >= 1");
  return ResolveMetricSelection(config).status();
}

absl::StatusOr<std::set<std::string>> ResolveMetricSelection(const EvalConfig& config) {
  const auto& groups = MetricGroups();
  std::set<std::string> all;
  for (const auto& [group, keys] : groups) {
    all.insert(keys.begin(), keys.end());
    if (std::find(std::begin(kPerCutoffGroups), std::end(kPerCutoffGroups), group) ==
        std::end(kPerCutoffGroups)) {
      continue;
    }
    for (int k : config.extra_k) {
      for (const std::string& key : keys) all.insert(Suffixed(key, k));
    }
  }
  if (config.metrics.empty()) return all;
  std::set<std::string> selected;
  for (const std::string& entry : config.metrics) {
    if (entry == "all") return all;
    const auto group = groups.find(entry);
    if (group != groups.end()) {
      for (const std::string& key : group->second) {
        selected.insert(key);
        for (int k : config.extra_k) {
          if (all.contains(Suffixed(key, k))) selected.insert(Suffixed(key, k));
        }
      }
      continue;
    }
    if (!all.contains(entry)) {
      return MakeError(ErrorKind::kInvalidConfig,
                       absl::StrCat("unknown metric '", entry, "'"));
    }
    selected.insert(entry);
  }
  return selected;
}

absl::StatusOr<PredictionSet> SelectTopK(const PredictionSet& prediction, int k) {
  MPEVAL_ASSIGN_OR_RETURN(const TopK top, NormalizeTopK(prediction, k));
  PredictionSet out;
  out.scene_id = prediction.scene_id;
  out.agent_id = prediction.agent_id;
  out.probabilities = top.probabilities;
  if (prediction.goal_scores) out.goal_scores.emplace();
  for (int mode : top.modes) {
    out.modes.push_back(prediction.modes[mode]);
    if (prediction.goal_scores) out.goal_scores->push_back((*prediction.goal_scores)[mode]);
  }
  return out;
}

Json EvalConfigToJson(const EvalConfig& config) {
  Json json;
  json["preset"] = config.preset;
  json["k"] = config.k;
  json["extra_k"] = config.extra_k;
  json["miss_threshold"] = config.miss.threshold;
  json["miss_definition"] = MissDefinitionName(config.miss.definition);
  json["metrics"] = config.metrics;
  json["dao_resolution"] = config.dao_resolution;
  json["scr_iou_threshold"] = config.scr_iou_threshold;
  json["default_dims"] = config.default_dims;
  json["oncoming_angle_cut_deg"] = config.oncoming.angle_cut_deg;
  json["oncoming_lane_threshold"] = config.oncoming.lane_threshold;
  json["lateral_assign_threshold"] = config.lateral.assign_threshold;
  json["lateral_candidate_radius"] = config.lateral.candidate_radius;
  json["lateral_candidate_max_angle"] = config.lateral.candidate_max_angle;
  json["kde_bandwidth"] = config.kde_bandwidth ? Json(*config.kde_bandwidth) : Json();
  json["bucket_speed_floor"] = config.buckets.speed_floor;
  json["bucket_straight_deg"] = config.buckets.straight_deg;
  json["bucket_slight_turn_deg"] = config.buckets.slight_turn_deg;
  json["bucket_turn_deg"] = config.buckets.turn_deg;
  json["ap_interpolation"] = InterpolationName(config.ap_interpolation);
  json["headline"] = config.headline;
  json["seed"] = config.seed;
  return json;
}

absl::StatusOr<EvalConfig> EvalConfigFromJson(const Json& json) {
  if (!json.is_object()) return MakeError(ErrorKind::kInvalidConfig, "config must be an object");
  static const std::set<std::string> kKnown = {
      "preset", "k", "extra_k", "miss_threshold", "miss_definition", "metrics",
      "dao_resolution", "scr_iou_threshold", "default_dims", "oncoming_angle_cut_deg",
      "oncoming_lane_threshold", "lateral_assign_threshold", "lateral_candidate_radius",
      "lateral_candidate_max_angle", "kde_bandwidth", "bucket_speed_floor",
      "bucket_straight_deg", "bucket_slight_turn_deg", "bucket_turn_deg",
      "ap_interpolation", "headline", "seed"};
  for (const auto& [key, value] : json.items()) {
    if (!kKnown.contains(key)) {
      return MakeError(ErrorKind::kInvalidConfig, absl::StrCat("unknown config field ", key));
    }
  }
  EvalConfig config;
  if (json.contains("preset")) {
    std::string preset;
    MPEVAL_RETURN_IF_ERROR(Read(json, "preset", preset));
    MPEVAL_ASSIGN_OR_RETURN(config, PresetConfig(preset));
  }
  MPEVAL_RETURN_IF_ERROR(Read(json, "k", config.k));
  MPEVAL_RETURN_IF_ERROR(Read(json, "extra_k", config.extra_k));
  MPEVAL_RETURN_IF_ERROR(Read(json, "miss_threshold", config.miss.threshold));
  std::string miss_definition(MissDefinitionName(config.miss.definition));
  MPEVAL_RETURN_IF_ERROR(Read(json, "miss_definition", miss_definition));
  const std::optional<MissDefinition> definition = ParseMissDefinition(miss_definition);
  if (!definition) return MakeError(ErrorKind::kInvalidConfig, "unknown miss definition");
  config.miss.definition = *definition;
  MPEVAL_RETURN_IF_ERROR(Read(json, "metrics", config.metrics));
  MPEVAL_RETURN_IF_ERROR(Read(json, "dao_resolution", config.dao_resolution));
  MPEVAL_RETURN_IF_ERROR(Read(json, "scr_iou_threshold", config.scr_iou_threshold));
  MPEVAL_RETURN_IF_ERROR(Read(json, "default_dims", config.default_dims));
  MPEVAL_RETURN_IF_ERROR(Read(json, "oncoming_angle_cut_deg", config.oncoming.angle_cut_deg));
  MPEVAL_RETURN_IF_ERROR(Read(json, "oncoming_lane_threshold", config.oncoming.lane_threshold));
  MPEVAL_RETURN_IF_ERROR(
      Read(json, "lateral_assign_threshold", config.lateral.assign_threshold));
  MPEVAL_RETURN_IF_ERROR(
      Read(json, "lateral_candidate_radius", config.lateral.candidate_radius));
  MPEVAL_RETURN_IF_ERROR(
      Read(json, "lateral_candidate_max_angle", config.lateral.candidate_max_angle));
  if (json.contains("kde_bandwidth") && !json["kde_bandwidth"].is_null()) {
    double bandwidth = 0.0;
    MPEVAL_RETURN_IF_ERROR(Read(json, "kde_bandwidth", bandwidth));
    config.kde_bandwidth = bandwidth;
  }
  MPEVAL_RETURN_IF_ERROR(Read(json, "bucket_speed_floor", config.buckets.speed_floor));
  MPEVAL_RETURN_IF_ERROR(Read(json, "bucket_straight_deg", config.buckets.straight_deg));
  MPEVAL_RETURN_IF_ERROR(
      Read(json, "bucket_slight_turn_deg", config.buckets.slight_turn_deg));
  MPEVAL_RETURN_IF_ERROR(Read(json, "bucket_turn_deg", config.buckets.turn_deg));
  std::string interpolation(InterpolationName(config.ap_interpolation));
  MPEVAL_RETURN_IF_ERROR(Read(json, "ap_interpolation", interpolation));
  const std::optional<ApInterpolation> parsed = ParseInterpolation(interpolation);
  if (!parsed) return MakeError(ErrorKind::kInvalidConfig, "unknown AP interpolation");
  config.ap_interpolation = *parsed;
  MPEVAL_RETURN_IF_ERROR(Read(json, "headline", config.headline));
  MPEVAL_RETURN_IF_ERROR(Read(json, "seed", config.seed));
  MPEVAL_RETURN_IF_ERROR(ValidateEvalConfig(config));
  return config;
}

absl::StatusOr<ExperimentResult> EvaluateExperiment(
    std::span<const Scene> scenes, std::span<const PredictionSet> predictions,
    const EvalConfig& config, absl::string_view experiment) {
  MPEVAL_RETURN_IF_ERROR(ValidateEvalConfig(config));
  MPEVAL_ASSIGN_OR_RETURN(const std::set<std::string> selected,
                          ResolveMetricSelection(config));

  std::map<std::string, std::size_t> scene_index;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (!scene_index.emplace(scenes[i].scene_id, i).second) {
      return MakeError(ErrorKind::kInvariantViolation,
                       absl::StrCat("duplicate scene id ", scenes[i].scene_id));
    }
  }
  std::vector<SceneInputs> inputs(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) inputs[i].scene = &scenes[i];
  std::set<std::string> seen;
  for (const PredictionSet& p : predictions) {
    const auto it = scene_index.find(p.scene_id);
    if (it == scene_index.end()) {
      return MakeError(ErrorKind::kDanglingReference,
                       absl::StrCat("prediction references unknown scene ", p.scene_id));
    }
    const Scene& scene = scenes[it->second];
    if (scene.FindAgent(p.agent_id) == nullptr) {
      return MakeError(ErrorKind::kDanglingReference,
                       absl::StrCat("prediction references unknown agent ", p.agent_id,
                                    " in scene ", p.scene_id));
    }
    if (!seen.insert(AgentKey(p.scene_id, p.agent_id)).second) {
      return MakeError(ErrorKind::kInvariantViolation,
                       absl::StrCat("duplicate prediction for agent ", p.agent_id,
                                    " in scene ", p.scene_id));
    }
    MPEVAL_RETURN_IF_ERROR(ValidatePredictionSet(p, std::nullopt));
    SceneInputs& in = inputs[it->second];
    in.agents.push_back(&p);
    if (p.agent_id == scene.focal_agent) in.focal = &p;
  }
  for (SceneInputs& in : inputs) {
    std::sort(in.agents.begin(), in.agents.end(),
              [&](const PredictionSet* a, const PredictionSet* b) {
                const bool fa = a == in.focal;
                const bool fb = b == in.focal;
                if (fa != fb) return fa;
                return a->agent_id < b->agent_id;
              });
  }

  // scene_index iterates in id order.
  std::vector<std::size_t> order;
  for (const auto& [id, index] : scene_index) order.push_back(index);

  const SceneEvaluator evaluator(config, selected);
  std::vector<SceneRecord> records(order.size());
  std::vector<std::optional<MapSample>> samples(order.size());
  ParallelFor(order.size(), config.jobs, [&](std::size_t i) {
    records[i] = evaluator.Run(inputs[order[i]], experiment, &samples[i]);
  });

  ExperimentResult result;
  result.experiment = std::string(experiment);
  result.records = std::move(records);
  if (selected.contains("mAP") || selected.contains("soft_mAP")) {
    std::vector<MapSample> dataset;
    for (std::optional<MapSample>& s : samples) {
      if (s) dataset.push_back(std::move(*s));
    }
    for (const auto& [key, soft] : {std::pair{"mAP", false}, std::pair{"soft_mAP", true}}) {
      if (!selected.contains(key)) continue;
      const absl::StatusOr<MapResult> map =
          MeanAveragePrecision(dataset, soft, config.ap_interpolation);
      if (map.ok()) {
        result.dataset_metrics[key] = map->mean_ap;
      } else {
        result.dataset_failures[key] = std::string(map.status().message());
      }
    }
  }
  return result;
}

MetricReport BuildReport(const EvalConfig& config,
                         const std::map<std::string, std::string>& input_digests,
                         const std::vector<ExperimentResult>& experiments) {
  MetricReport report;
  report.config = EvalConfigToJson(config);
  report.input_digests = input_digests;
  for (const ExperimentResult& e : experiments) {
    report.records.insert(report.records.end(), e.records.begin(), e.records.end());
  }
  report.summaries = Aggregate(report.records);
  for (ExperimentSummary& summary : report.summaries) {
    for (const ExperimentResult& e : experiments) {
      if (e.experiment != summary.experiment) continue;
      summary.dataset_metrics = e.dataset_metrics;
      for (const auto& [key, message] : e.dataset_failures) {
        ++summary.flag_counts[absl::StrCat("dataset_failure:", key)];
      }
    }
  }
  return report;
}

bool HasFailures(const MetricReport& report) {
  return std::any_of(report.records.begin(), report.records.end(),
                     [](const SceneRecord& r) { return !r.failures.empty(); });
}

}  // namespace mpeval
