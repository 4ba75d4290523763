// Copyright 2026 The CADP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cadp/cli/exit_codes.h"

#include "absl/strings/cord.h"
#include "absl/strings/numbers.h"

namespace cadp::cli {
namespace {

constexpr char kPayloadKey[] = "cadp.dev/exit-code";

}  // namespace

absl::Status WithExitCode(absl::Status status, ExitCode code) {
  if (status.ok()) return status;
  status.SetPayload(kPayloadKey, absl::Cord(std::to_string(static_cast<int>(code))));
  return status;
}

int ExitCodeOf(const absl::Status& status) {
  if (status.ok()) return 0;
  if (auto payload = status.GetPayload(kPayloadKey)) {
    int code;
    if (absl::SimpleAtoi(std::string(*payload), &code)) return code;
  }
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return static_cast<int>(ExitCode::kConfig);
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kOutOfRange:
      return static_cast<int>(ExitCode::kData);
    case absl::StatusCode::kAborted:
      return static_cast<int>(ExitCode::kDivergence);
    case absl::StatusCode::kFailedPrecondition:
      return static_cast<int>(ExitCode::kMechanism);
    default:
      return static_cast<int>(ExitCode::kInternal);
  }
}

}  // namespace cadp::cli
