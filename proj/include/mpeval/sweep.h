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

// Robustness sweeps: perturb every scene per spec, obtain predictions for the
// perturbed inputs from a provider, and score them against the clean scenes.

#ifndef MPEVAL_SWEEP_H_
#define MPEVAL_SWEEP_H_

#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mpeval/evaluate.h"
#include "mpeval/perturbation.h"
#include "mpeval/report.h"
#include "mpeval/scene.h"

namespace mpeval {

inline constexpr char kBaselineLabel[] = "baseline";

// Source of predictions for (possibly perturbed) scenes. Implementations must
// be safe to call from several threads at once.
class PredictionProvider {
 public:
  virtual ~PredictionProvider() = default;

  // `label` names the experiment ("baseline" or a PerturbationSpec label).
  virtual absl::StatusOr<std::vector<PredictionSet>> Predict(
      absl::string_view label, std::span<const Scene> scenes) = 0;
};

class FunctionProvider : public PredictionProvider {
 public:
  using Fn = std::function<absl::StatusOr<std::vector<PredictionSet>>(
      absl::string_view, std::span<const Scene>)>;

  explicit FunctionProvider(Fn fn) : fn_(std::move(fn)) {}

  absl::StatusOr<std::vector<PredictionSet>> Predict(
      absl::string_view label, std::span<const Scene> scenes) override {
    return fn_(label, scenes);
  }

 private:
  Fn fn_;
};

// Reads `{dir}/{label}.jsonl` once per label and serves the predictions of
// the requested scenes.
class PrecomputedProvider : public PredictionProvider {
 public:
  explicit PrecomputedProvider(std::string dir) : dir_(std::move(dir)) {}

  absl::StatusOr<std::vector<PredictionSet>> Predict(
      absl::string_view label, std::span<const Scene> scenes) override;

 private:
  std::string dir_;
  std::mutex mu_;
  std::map<std::string, absl::StatusOr<std::vector<PredictionSet>>> cache_;
};

// Runs an external predictor once per batch: scenes go to its standard input
// as scene JSONL, prediction JSONL is read from its standard output. A
// nonzero exit, a timeout or malformed output is a ProviderFailure.
class SubprocessProvider : public PredictionProvider {
 public:
  SubprocessProvider(std::vector<std::string> argv, double timeout_s)
      : argv_(std::move(argv)), timeout_s_(timeout_s) {}

  absl::StatusOr<std::vector<PredictionSet>> Predict(
      absl::string_view label, std::span<const Scene> scenes) override;

 private:
  std::vector<std::string> argv_;
  double timeout_s_;
};

struct SweepConfig {
  EvalConfig eval;
  std::vector<PerturbationSpec> specs;
  bool include_baseline = true;
  int batch_size = 16;
  // Concurrent provider calls.
  int max_concurrency = 1;
};

struct SweepResult {
  MetricReport report;
  // Experiment label -> scenes whose predictions could not be obtained.
  std::map<std::string, int> provider_failures;
  // Markdown table, one row per experiment.
  std::string table;
};

// Predictions are scored against the unperturbed scenes: masking models a
// perception failure on the predictor's input, not a change of the world.
absl::StatusOr<SweepResult> RunSweep(std::span<const Scene> scenes,
                                     PredictionProvider& provider,
                                     const SweepConfig& config);

// Columns of the robustness table for `config`: minADE, minFDE, MR, avgFDE,
// RF, DAC, then minADE and MR for each extra cutoff.
std::vector<std::string> RobustnessColumns(const EvalConfig& config);

}  // namespace mpeval

#endif  // MPEVAL_SWEEP_H_
