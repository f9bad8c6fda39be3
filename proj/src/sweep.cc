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

#include "mpeval/sweep.h"

#include <algorithm>
#include <optional>
#include <set>

#include "absl/strings/str_cat.h"
#include "mpeval/io.h"
#include "mpeval/parallel.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

struct Experiment {
  std::string label;
  std::optional<PerturbationSpec> spec;
};

// Provider output must stay inside the batch it was asked about.
absl::Status CheckBatchOutput(std::span<const Scene> batch,
                              const std::vector<PredictionSet>& predictions) {
  for (const PredictionSet& p : predictions) {
    const auto it = std::find_if(batch.begin(), batch.end(), [&](const Scene& s) {
      return s.scene_id == p.scene_id;
    });
    if (it == batch.end() || it->FindAgent(p.agent_id) == nullptr) {
      return MakeError(ErrorKind::kProviderFailure,
                       absl::StrCat("provider returned a prediction for unknown agent ",
                                    p.agent_id, " in scene ", p.scene_id));
    }
    MPEVAL_RETURN_IF_ERROR(ValidatePredictionSet(p, std::nullopt));
  }
  return absl::OkStatus();
}

absl::Status AsProviderFailure(const absl::Status& status) {
  if (GetErrorKind(status) == ErrorKind::kProviderFailure) return status;
  return MakeError(ErrorKind::kProviderFailure, status.message());
}

}  // namespace

absl::StatusOr<std::vector<PredictionSet>> PrecomputedProvider::Predict(
    absl::string_view label, std::span<const Scene> scenes) {
  const absl::StatusOr<std::vector<PredictionSet>>* all = nullptr;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(std::string(label));
    if (it == cache_.end()) {
      it = cache_.emplace(std::string(label),
                          LoadPredictions(absl::StrCat(dir_, "/", label, ".jsonl")))
               .first;
    }
    all = &it->second;
  }
  if (!all->ok()) return AsProviderFailure(all->status());
  std::set<std::string> wanted;
  for (const Scene& s : scenes) wanted.insert(s.scene_id);
  std::vector<PredictionSet> out;
  for (const PredictionSet& p : **all) {
    if (wanted.contains(p.scene_id)) out.push_back(p);
  }
  return out;
}

std::vector<std::string> RobustnessColumns(const EvalConfig& config) {
  std::vector<std::string> columns = {"minADE", "minFDE", "MR", "avgFDE", "RF", "DAC"};
  for (int k : config.extra_k) {
    columns.push_back(absl::StrCat("minADE_", k));
    columns.push_back(absl::StrCat("MR_", k));
  }
  return columns;
}

absl::StatusOr<SweepResult> RunSweep(std::span<const Scene> scenes,
                                     PredictionProvider& provider,
                                     const SweepConfig& config) {
  MPEVAL_RETURN_IF_ERROR(ValidateEvalConfig(config.eval));
  if (config.batch_size < 1 || config.max_concurrency < 1) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "batch size and concurrency must be >= 1");
  }
  std::vector<Experiment> experiments;
  if (config.include_baseline) experiments.push_back({kBaselineLabel, std::nullopt});
  std::set<std::string> labels;
  for (const PerturbationSpec& spec : config.specs) {
    MPEVAL_RETURN_IF_ERROR(ValidatePerturbationSpec(spec));
    experiments.push_back({spec.Label(), spec});
  }
  for (const Experiment& e : experiments) {
    if (!labels.insert(e.label).second) {
      return MakeError(ErrorKind::kInvalidConfig,
                       absl::StrCat("experiment ", e.label, " appears twice"));
    }
  }

  SweepResult result;
  std::vector<ExperimentResult> evaluated;
  for (const Experiment& e : experiments) {
    std::vector<Scene> inputs(scenes.size());
    ParallelFor(scenes.size(), config.eval.jobs, [&](std::size_t i) {
      inputs[i] = e.spec ? Perturb(scenes[i], *e.spec) : scenes[i];
    });

    const std::size_t batches =
        (inputs.size() + config.batch_size - 1) / config.batch_size;
    std::vector<absl::StatusOr<std::vector<PredictionSet>>> outputs(
        batches, std::vector<PredictionSet>{});
    ParallelFor(batches, config.max_concurrency, [&](std::size_t b) {
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(inputs.size(), begin + config.batch_size);
      const std::span<const Scene> batch(inputs.data() + begin, end - begin);
      absl::StatusOr<std::vector<PredictionSet>> out = provider.Predict(e.label, batch);
      if (out.ok()) {
        const absl::Status check = CheckBatchOutput(batch, *out);
        if (!check.ok()) out = check;
      } else {
        out = AsProviderFailure(out.status());
      }
      outputs[b] = std::move(out);
    });

    std::vector<PredictionSet> predictions;
    std::map<std::string, std::string> failed;
    for (std::size_t b = 0; b < batches; ++b) {
      if (outputs[b].ok()) {
        for (PredictionSet& p : *outputs[b]) predictions.push_back(std::move(p));
        continue;
      }
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(inputs.size(), begin + config.batch_size);
      for (std::size_t i = begin; i < end; ++i) {
        failed[inputs[i].scene_id] = std::string(outputs[b].status().message());
      }
    }
    // Batches cannot overlap, but two batches may still answer for the same
    // agent when a provider ignores its input; keep the first answer.
    std::set<std::pair<std::string, std::string>> seen;
    std::erase_if(predictions, [&](const PredictionSet& p) {
      return !seen.insert({p.scene_id, p.agent_id}).second;
    });

    MPEVAL_ASSIGN_OR_RETURN(
        ExperimentResult r,
        EvaluateExperiment(scenes, predictions, config.eval, e.label));
    for (SceneRecord& record : r.records) {
      const auto it = failed.find(record.scene_id);
      if (it == failed.end()) continue;
      record.metrics.clear();
      record.failures = {{"provider", it->second}};
    }
    result.provider_failures[e.label] = static_cast<int>(failed.size());
    evaluated.push_back(std::move(r));
  }

  result.report = BuildReport(config.eval, {}, evaluated);
  // Summaries come back in name order; the table keeps experiment order.
  std::vector<ExperimentSummary> ordered;
  for (const Experiment& e : experiments) {
    for (const ExperimentSummary& s : result.report.summaries) {
      if (s.experiment == e.label) ordered.push_back(s);
    }
  }
  MetricReport table_view;
  table_view.summaries = std::move(ordered);
  result.table = ComparisonTable({table_view}, RobustnessColumns(config.eval));
  return result;
}

}  // namespace mpeval
