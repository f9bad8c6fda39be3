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

// JSONL interchange for scenes, predictions and cluster sets.
//
// Every parse error is a SchemaError naming the line and field; values that
// parse but break a type invariant are InvariantViolation with the line
// number. Nothing that fails here reaches metric code.

#ifndef MPEVAL_IO_H_
#define MPEVAL_IO_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "mpeval/intent.h"
#include "mpeval/scene.h"

namespace mpeval {

absl::StatusOr<Scene> ParseSceneLine(absl::string_view line, int line_number = 1);
absl::StatusOr<PredictionSet> ParsePredictionLine(absl::string_view line,
                                                  int line_number = 1);
absl::StatusOr<IntentClusterSet> ParseClusterSetLine(absl::string_view line,
                                                     int line_number = 1);

// Single-line JSON, keys sorted, doubles in shortest round-trip form.
std::string SceneToJsonLine(const Scene& scene);
std::string PredictionToJsonLine(const PredictionSet& prediction);
std::string ClusterSetToJsonLine(const IntentClusterSet& set);

// Whole-file helpers. Blank lines are skipped but still counted.
absl::StatusOr<std::vector<Scene>> ParseScenes(absl::string_view text);
absl::StatusOr<std::vector<PredictionSet>> ParsePredictions(absl::string_view text);
absl::StatusOr<std::vector<IntentClusterSet>> ParseClusterSets(absl::string_view text);

absl::StatusOr<std::vector<Scene>> LoadScenes(const std::string& path);
absl::StatusOr<std::vector<PredictionSet>> LoadPredictions(const std::string& path);
absl::StatusOr<std::vector<IntentClusterSet>> LoadClusterSets(const std::string& path);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

// One object per line, each terminated by '\n'.
std::string ScenesToJsonl(const std::vector<Scene>& scenes);
std::string PredictionsToJsonl(const std::vector<PredictionSet>& predictions);
std::string ClusterSetsToJsonl(const std::vector<IntentClusterSet>& sets);

// Lowercase hex SHA-256.
std::string Sha256Hex(absl::string_view bytes);

}  // namespace mpeval

#endif  // MPEVAL_IO_H_
