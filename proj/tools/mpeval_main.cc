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

// mpeval: evaluate, perturb, cluster, render, report and sweep.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "mpeval/evaluate.h"
#include "mpeval/geometry.h"
#include "mpeval/intent.h"
#include "mpeval/io.h"
#include "mpeval/parallel.h"
#include "mpeval/perturbation.h"
#include "mpeval/render.h"
#include "mpeval/report.h"
#include "mpeval/status.h"
#include "mpeval/sweep.h"

namespace mpeval {
namespace {

struct EvalFlags {
  CLI::Option* preset_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* miss_def_opt = nullptr;
  CLI::Option* metrics_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  std::string preset = "argoverse";
  std::string config_path;
  int k = 6;
  double miss_threshold = 2.0;
  std::string miss_def = "endpoint";
  std::string metrics = "all";
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct OutputFlags {
  std::string out;
  std::string format = "json";
};

void AddEvalFlags(CLI::App* app, EvalFlags& f) {
  f.preset_opt = app->add_option("--preset", f.preset, "argoverse or nuscenes");
  app->add_option("--config", f.config_path,
                  "JSON config, or a report whose echoed config is reused");
  f.k_opt = app->add_option("--k", f.k, "Modes considered per prediction");
  f.threshold_opt =
      app->add_option("--miss-threshold", f.miss_threshold, "Miss threshold in meters");
  f.miss_def_opt = app->add_option("--miss-def", f.miss_def, "endpoint or max-pointwise")
                       ->check(CLI::IsMember({"endpoint", "max-pointwise"}));
  f.metrics_opt = app->add_option("--metrics", f.metrics,
                                  "Comma-separated metric keys or groups, or all");
  f.seed_opt = app->add_option("--seed", f.seed, "Seed recorded in the config");
  app->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void AddOutputFlags(CLI::App* app, OutputFlags& f) {
  app->add_option("--out", f.out, "Output path; standard output when omitted");
  app->add_option("--format", f.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

absl::StatusOr<nlohmann::json> ReadJson(const std::string& path) {
  MPEVAL_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  nlohmann::json json = nlohmann::json::parse(text, nullptr, false);
  if (json.is_discarded()) {
    return MakeError(ErrorKind::kSchemaError, absl::StrCat(path, ": not valid JSON"));
  }
  return json;
}

absl::StatusOr<EvalConfig> BuildEvalConfig(const EvalFlags& f) {
  EvalConfig config;
  if (!f.config_path.empty()) {
    MPEVAL_ASSIGN_OR_RETURN(nlohmann::json json, ReadJson(f.config_path));
    if (json.is_object() && json.contains("config") && json.contains("records")) {
      json = json["config"];
    }
    MPEVAL_ASSIGN_OR_RETURN(config, EvalConfigFromJson(json));
    if (f.preset_opt->count() > 0) {
      return MakeError(ErrorKind::kInvalidConfig, "--preset and --config are exclusive");
    }
  } else {
    MPEVAL_ASSIGN_OR_RETURN(config, PresetConfig(f.preset));
  }
  if (f.k_opt->count() > 0) {
    config.k = f.k;
    std::erase_if(config.extra_k, [&](int k) { return k <= f.k; });
  }
  if (f.threshold_opt->count() > 0) config.miss.threshold = f.miss_threshold;
  if (f.miss_def_opt->count() > 0) {
    config.miss.definition = *ParseMissDefinition(f.miss_def);
  }
  if (f.metrics_opt->count() > 0) {
    config.metrics.clear();
    if (f.metrics != "all") {
      config.metrics = absl::StrSplit(f.metrics, ',', absl::SkipWhitespace());
    }
  }
  if (f.seed_opt->count() > 0) config.seed = f.seed;
  config.jobs = f.jobs;
  MPEVAL_RETURN_IF_ERROR(ValidateEvalConfig(config));
  return config;
}

absl::Status Emit(const std::string& path, absl::string_view contents) {
  if (path.empty()) {
    std::cout << contents;
    return absl::OkStatus();
  }
  return WriteFile(path, contents);
}

absl::StatusOr<std::string> Digest(const std::string& path) {
  MPEVAL_ASSIGN_OR_RETURN(const std::string bytes, ReadFile(path));
  return Sha256Hex(bytes);
}

int Fail(const absl::Status& status) {
  std::cerr << "mpeval: " << status.message() << "\n";
  return kExitValidation;
}

void ReportPartial(const MetricReport& report) {
  for (const SceneRecord& r : report.records) {
    for (const auto& [key, message] : r.failures) {
      std::cerr << "mpeval: " << r.experiment << " " << r.scene_id << " " << key << ": "
                << message << "\n";
    }
  }
}

absl::StatusOr<int> WriteReport(const MetricReport& report, const OutputFlags& out) {
  MPEVAL_RETURN_IF_ERROR(Emit(
      out.out, out.format == "csv" ? WriteReportCsv(report) : WriteReportJson(report)));
  if (HasFailures(report)) {
    ReportPartial(report);
    return kExitPartial;
  }
  return kExitOk;
}

struct EvaluateCommand {
  EvalFlags eval;
  OutputFlags out;
  std::string scenes;
  std::string preds;
  std::string experiment = "default";

  absl::StatusOr<int> Run() const {
    MPEVAL_ASSIGN_OR_RETURN(const EvalConfig config, BuildEvalConfig(eval));
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<Scene> scene_list, LoadScenes(scenes));
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<PredictionSet> predictions,
                            LoadPredictions(preds));
    std::map<std::string, std::string> digests;
    MPEVAL_ASSIGN_OR_RETURN(digests["scenes"], Digest(scenes));
    MPEVAL_ASSIGN_OR_RETURN(digests["preds"], Digest(preds));
    MPEVAL_ASSIGN_OR_RETURN(
        const ExperimentResult result,
        EvaluateExperiment(scene_list, predictions, config, experiment));
    return WriteReport(BuildReport(config, digests, {result}), out);
  }
};

struct PerturbFlags {
  std::string target = "lanes";
  std::vector<double> recall = {1.0};
  std::vector<double> detect_prob = {0.5};
  double interaction_radius = 20.0;
  std::uint64_t seed = 0;
};

void AddPerturbFlags(CLI::App* app, PerturbFlags& f, bool lists, bool with_seed) {
  app->add_option("--target", f.target, "lanes, agents, frames or no-agents")
      ->check(CLI::IsMember({"lanes", "agents", "frames", "no-agents"}));
  CLI::Option* recall = app->add_option("--recall", f.recall, "Keep probability");
  CLI::Option* detect =
      app->add_option("--detect-prob", f.detect_prob, "Per-frame keep probability");
  if (lists) {
    recall->delimiter(',');
    detect->delimiter(',');
  } else {
    recall->expected(1);
    detect->expected(1);
  }
  app->add_option("--interaction-radius", f.interaction_radius,
                  "Radius in meters for the frames target");
  if (with_seed) app->add_option("--seed", f.seed, "Masking seed");
}

std::vector<PerturbationSpec> SpecsFrom(const PerturbFlags& f) {
  PerturbationSpec base;
  base.target = *ParsePerturbTarget(f.target);
  base.interaction_radius = f.interaction_radius;
  base.seed = f.seed;
  std::vector<PerturbationSpec> specs;
  switch (base.target) {
    case PerturbTarget::kAllAgentsRemoved:
      specs.push_back(base);
      break;
    case PerturbTarget::kFramesInteracting:
      for (double p : f.detect_prob) {
        base.detect_prob = p;
        specs.push_back(base);
      }
      break;
    default:
      for (double r : f.recall) {
        base.recall = r;
        specs.push_back(base);
      }
  }
  return specs;
}

struct PerturbCommand {
  PerturbFlags perturb;
  std::string scenes;
  std::string out;
  int jobs = 1;

  absl::StatusOr<int> Run() const {
    const PerturbationSpec spec = SpecsFrom(perturb).front();
    MPEVAL_RETURN_IF_ERROR(ValidatePerturbationSpec(spec));
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<Scene> input, LoadScenes(scenes));
    std::vector<Scene> output(input.size());
    ParallelFor(input.size(), jobs,
                [&](std::size_t i) { output[i] = Perturb(input[i], spec); });
    MPEVAL_RETURN_IF_ERROR(Emit(out, ScenesToJsonl(output)));
    return kExitOk;
  }
};

struct ClusterCommand {
  std::string scenes;
  std::string preds;
  std::string out;
  std::string clustered_preds;
  std::string partition = "corridor";
  double radius = 20.0;
  double lane_threshold = 2.5;
  double max_angle_deg = 45.0;
  int jobs = 1;

  absl::StatusOr<int> Run() const {
    IntentConfig config;
    config.search_radius = radius;
    config.lane_threshold = lane_threshold;
    config.max_angle = max_angle_deg * kPi / 180.0;
    config.partition = *ParsePartitionRule(partition);
    MPEVAL_RETURN_IF_ERROR(ValidateIntentConfig(config));
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<Scene> scene_list, LoadScenes(scenes));
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<PredictionSet> predictions,
                            LoadPredictions(preds));
    std::map<std::string, const Scene*> by_id;
    for (const Scene& s : scene_list) by_id[s.scene_id] = &s;
    for (const PredictionSet& p : predictions) {
      const auto it = by_id.find(p.scene_id);
      if (it == by_id.end() || it->second->FindAgent(p.agent_id) == nullptr) {
        return MakeError(ErrorKind::kDanglingReference,
                         absl::StrCat("prediction for unknown scene or agent ",
                                      p.scene_id, "/", p.agent_id));
      }
    }

    std::vector<absl::StatusOr<IntentClusterSet>> sets(predictions.size(),
                                                       IntentClusterSet{});
    std::vector<absl::StatusOr<PredictionSet>> clustered(predictions.size(),
                                                         PredictionSet{});
    ParallelFor(predictions.size(), jobs, [&](std::size_t i) {
      sets[i] = ClusterGoals(predictions[i], *by_id.at(predictions[i].scene_id), config);
      clustered[i] = sets[i].ok() ? ClustersAsPrediction(*sets[i], predictions[i])
                                  : absl::StatusOr<PredictionSet>(sets[i].status());
    });

    int exit_code = kExitOk;
    std::vector<IntentClusterSet> written;
    std::vector<PredictionSet> as_predictions;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const absl::Status status = clustered[i].status();
      if (!status.ok()) {
        std::cerr << "mpeval: " << predictions[i].scene_id << "/"
                  << predictions[i].agent_id << ": " << status.message() << "\n";
        exit_code = kExitPartial;
      }
      if (sets[i].ok()) written.push_back(*std::move(sets[i]));
      if (clustered[i].ok()) as_predictions.push_back(*std::move(clustered[i]));
    }
    MPEVAL_RETURN_IF_ERROR(Emit(out, ClusterSetsToJsonl(written)));
    if (!clustered_preds.empty()) {
      MPEVAL_RETURN_IF_ERROR(WriteFile(clustered_preds, PredictionsToJsonl(as_predictions)));
    }
    return exit_code;
  }
};

struct RenderCommand {
  std::string scenes;
  std::string preds;
  std::string clusters;
  std::string out = ".";
  std::string experiment;
  double scale = 8.0;
  bool no_ground_truth = false;

  absl::StatusOr<int> Run() const {
    RenderStyle style;
    style.scale = scale;
    MPEVAL_RETURN_IF_ERROR(ValidateRenderStyle(style));
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<Scene> scene_list, LoadScenes(scenes));
    std::map<std::string, const Scene*> by_id;
    for (const Scene& s : scene_list) by_id[s.scene_id] = &s;
    const auto check_scene = [&](const std::string& id) -> absl::Status {
      if (by_id.contains(id)) return absl::OkStatus();
      return MakeError(ErrorKind::kDanglingReference,
                       absl::StrCat("input refers to unknown scene ", id));
    };

    std::map<std::string, std::vector<PredictionSet>> preds_by_scene;
    if (!preds.empty()) {
      MPEVAL_ASSIGN_OR_RETURN(std::vector<PredictionSet> all, LoadPredictions(preds));
      for (PredictionSet& p : all) {
        MPEVAL_RETURN_IF_ERROR(check_scene(p.scene_id));
        preds_by_scene[p.scene_id].push_back(std::move(p));
      }
    }
    std::map<std::string, IntentClusterSet> clusters_by_scene;
    if (!clusters.empty()) {
      MPEVAL_ASSIGN_OR_RETURN(std::vector<IntentClusterSet> all, LoadClusterSets(clusters));
      for (IntentClusterSet& c : all) {
        MPEVAL_RETURN_IF_ERROR(check_scene(c.scene_id));
        if (c.agent_id == by_id.at(c.scene_id)->focal_agent) {
          clusters_by_scene[c.scene_id] = std::move(c);
        }
      }
    }

    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) {
      return MakeError(ErrorKind::kInvalidConfig,
                       absl::StrCat("cannot create ", out, ": ", ec.message()));
    }
    for (const Scene& scene : scene_list) {
      RenderInputs inputs;
      inputs.scene = &scene;
      inputs.draw_ground_truth = !no_ground_truth;
      if (const auto it = preds_by_scene.find(scene.scene_id); it != preds_by_scene.end()) {
        inputs.predictions = it->second;
      }
      if (const auto it = clusters_by_scene.find(scene.scene_id);
          it != clusters_by_scene.end()) {
        inputs.clusters = &it->second;
      }
      MPEVAL_ASSIGN_OR_RETURN(const std::string svg, RenderScene(inputs, style));
      MPEVAL_RETURN_IF_ERROR(WriteFile(
          (std::filesystem::path(out) / SvgFileName(scene.scene_id, experiment)).string(),
          svg));
    }
    return kExitOk;
  }
};

struct ReportCommand {
  std::vector<std::string> inputs;
  std::string metrics;
  std::string out;

  absl::StatusOr<int> Run() const {
    std::vector<MetricReport> reports;
    for (const std::string& path : inputs) {
      MPEVAL_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
      absl::StatusOr<MetricReport> report = ParseReportJson(text);
      if (!report.ok()) {
        return MakeError(GetErrorKind(report.status()).value_or(ErrorKind::kSchemaError),
                         absl::StrCat(path, ": ", report.status().message()));
      }
      reports.push_back(*std::move(report));
    }
    std::vector<std::string> columns;
    if (!metrics.empty() && metrics != "all") {
      columns = absl::StrSplit(metrics, ',', absl::SkipWhitespace());
    }
    MPEVAL_RETURN_IF_ERROR(Emit(out, ComparisonTable(reports, columns)));
    return kExitOk;
  }
};

struct SweepCommand {
  EvalFlags eval;
  OutputFlags out;
  PerturbFlags perturb;
  std::string scenes;
  std::string preds_dir;
  std::string provider;
  std::string table;
  double timeout_s = 600.0;
  int batch_size = 16;
  int max_concurrency = 1;
  bool no_baseline = false;

  absl::StatusOr<int> Run() const {
    SweepConfig config;
    MPEVAL_ASSIGN_OR_RETURN(config.eval, BuildEvalConfig(eval));
    PerturbFlags masking = perturb;
    masking.seed = config.eval.seed;
    config.specs = SpecsFrom(masking);
    config.include_baseline = !no_baseline;
    config.batch_size = batch_size;
    config.max_concurrency = max_concurrency;
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<Scene> scene_list, LoadScenes(scenes));

    std::unique_ptr<PredictionProvider> source;
    if (!preds_dir.empty()) {
      source = std::make_unique<PrecomputedProvider>(preds_dir);
    } else {
      std::vector<std::string> argv = absl::StrSplit(provider, ' ', absl::SkipWhitespace());
      source = std::make_unique<SubprocessProvider>(std::move(argv), timeout_s);
    }
    MPEVAL_ASSIGN_OR_RETURN(SweepResult result, RunSweep(scene_list, *source, config));
    MPEVAL_ASSIGN_OR_RETURN(result.report.input_digests["scenes"], Digest(scenes));
    if (!table.empty()) {
      MPEVAL_RETURN_IF_ERROR(WriteFile(table, result.table));
    } else if (!out.out.empty()) {
      std::cout << result.table;
    }
    return WriteReport(result.report, out);
  }
};

int Main(int argc, char** argv) {
  CLI::App app{"Multi-modal motion prediction evaluation toolkit"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);

  EvaluateCommand evaluate;
  CLI::App* evaluate_app = app.add_subcommand("evaluate", "Score predictions");
  evaluate_app->add_option("--scenes", evaluate.scenes, "Scene JSONL")->required();
  evaluate_app->add_option("--preds", evaluate.preds, "Prediction JSONL")->required();
  evaluate_app->add_option("--experiment", evaluate.experiment, "Experiment label");
  AddEvalFlags(evaluate_app, evaluate.eval);
  AddOutputFlags(evaluate_app, evaluate.out);

  PerturbCommand perturb;
  CLI::App* perturb_app = app.add_subcommand("perturb", "Mask scene elements");
  perturb_app->add_option("--scenes", perturb.scenes, "Scene JSONL")->required();
  perturb_app->add_option("--out", perturb.out, "Output scene JSONL");
  perturb_app->add_option("--jobs", perturb.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  AddPerturbFlags(perturb_app, perturb.perturb, /*lists=*/false, /*with_seed=*/true);

  ClusterCommand cluster;
  CLI::App* cluster_app = app.add_subcommand("cluster", "Group goals into intentions");
  cluster_app->add_option("--scenes", cluster.scenes, "Scene JSONL")->required();
  cluster_app->add_option("--preds", cluster.preds, "Prediction JSONL")->required();
  cluster_app->add_option("--out", cluster.out, "Output cluster JSONL");
  cluster_app->add_option("--clustered-preds", cluster.clustered_preds,
                          "Also write one mode per cluster as prediction JSONL");
  cluster_app->add_option("--radius", cluster.radius, "Lane search radius in meters");
  cluster_app->add_option("--lane-threshold", cluster.lane_threshold,
                          "Goal-to-lane admission distance in meters");
  cluster_app->add_option("--max-angle-deg", cluster.max_angle_deg,
                          "Largest goal-to-lane heading difference");
  cluster_app->add_option("--partition", cluster.partition, "corridor or literal")
      ->check(CLI::IsMember({"corridor", "literal"}));
  cluster_app->add_option("--jobs", cluster.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  RenderCommand render;
  CLI::App* render_app = app.add_subcommand("render", "Draw scenes as SVG");
  render_app->add_option("--scenes", render.scenes, "Scene JSONL")->required();
  render_app->add_option("--preds", render.preds, "Prediction JSONL");
  render_app->add_option("--clusters", render.clusters, "Cluster JSONL");
  render_app->add_option("--out", render.out, "Output directory");
  render_app->add_option("--experiment", render.experiment, "Suffix for file names");
  render_app->add_option("--scale", render.scale, "Pixels per meter");
  render_app->add_flag("--no-ground-truth", render.no_ground_truth,
                       "Omit the focal agent's future");

  ReportCommand report;
  CLI::App* report_app = app.add_subcommand("report", "Compare metric reports");
  report_app->add_option("reports", report.inputs, "Report JSON files")->required();
  report_app->add_option("--metrics", report.metrics, "Columns, or all");
  report_app->add_option("--out", report.out, "Output markdown path");

  SweepCommand sweep;
  CLI::App* sweep_app = app.add_subcommand("sweep", "Perturbation robustness sweep");
  sweep_app->add_option("--scenes", sweep.scenes, "Scene JSONL")->required();
  CLI::Option* dir_opt = sweep_app->add_option(
      "--preds-dir", sweep.preds_dir, "Directory holding {label}.jsonl predictions");
  CLI::Option* provider_opt = sweep_app->add_option(
      "--provider", sweep.provider, "Predictor command reading scenes on stdin");
  dir_opt->excludes(provider_opt);
  sweep_app->add_option("--timeout", sweep.timeout_s, "Seconds per provider call");
  sweep_app->add_option("--batch-size", sweep.batch_size, "Scenes per provider call");
  sweep_app->add_option("--max-concurrency", sweep.max_concurrency,
                        "Concurrent provider calls");
  sweep_app->add_option("--table", sweep.table, "Write the markdown table here");
  sweep_app->add_flag("--no-baseline", sweep.no_baseline, "Skip the unperturbed run");
  AddEvalFlags(sweep_app, sweep.eval);
  AddOutputFlags(sweep_app, sweep.out);
  // The sweep's --seed drives both the masking and the echoed config.
  AddPerturbFlags(sweep_app, sweep.perturb, /*lists=*/true, /*with_seed=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (sweep_app->parsed() && dir_opt->count() == 0 && provider_opt->count() == 0) {
    std::cerr << "mpeval: sweep needs --preds-dir or --provider\n";
    return kExitValidation;
  }

  absl::StatusOr<int> code = kExitOk;
  if (evaluate_app->parsed()) code = evaluate.Run();
  if (perturb_app->parsed()) code = perturb.Run();
  if (cluster_app->parsed()) code = cluster.Run();
  if (render_app->parsed()) code = render.Run();
  if (report_app->parsed()) code = report.Run();
  if (sweep_app->parsed()) code = sweep.Run();
  if (!code.ok()) return Fail(code.status());
  return *code;
}

}  // namespace
}  // namespace mpeval

int main(int argc, char** argv) { return mpeval::Main(argc, argv); }
