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

#ifndef MPEVAL_STATUS_H_
#define MPEVAL_STATUS_H_

#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace mpeval {

// Named error conditions. Every non-OK status produced by the library carries
// one of these as a payload so callers can branch on the condition without
// parsing messages; the name is also the message prefix.
enum class ErrorKind {
  kLengthMismatch,
  kAllZeroProbabilities,
  kInconsistentModeCounts,
  kEmptyDataset,
  kTooShort,
  kNoLanes,
  kEmptyDrivableArea,
  kMissingDims,
  kDegenerateCluster,
  kNotPsd,
  kCrossSceneMismatch,
  kSchemaError,
  kInvariantViolation,
  kDanglingReference,
  kProviderFailure,
  kInvalidConfig,
  kAllGoalsDiscarded,
};

absl::string_view ErrorKindName(ErrorKind kind);

absl::Status MakeError(ErrorKind kind, absl::string_view detail);
std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

}  // namespace mpeval

#define MPEVAL_STATUS_CONCAT_INNER_(x, y) x##y
#define MPEVAL_STATUS_CONCAT_(x, y) MPEVAL_STATUS_CONCAT_INNER_(x, y)

#define MPEVAL_RETURN_IF_ERROR(expr)         \
  do {                                       \
    const absl::Status _status = (expr);     \
    if (!_status.ok()) return _status;       \
  } while (0)

#define MPEVAL_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                  \
  if (!tmp.ok()) return tmp.status();                 \
  lhs = std::move(tmp).value()

#define MPEVAL_ASSIGN_OR_RETURN(lhs, expr) \
  MPEVAL_ASSIGN_OR_RETURN_IMPL_(           \
      MPEVAL_STATUS_CONCAT_(_statusor_, __LINE__), lhs, expr)

#endif  // MPEVAL_STATUS_H_
