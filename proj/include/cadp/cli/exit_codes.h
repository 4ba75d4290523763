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

#ifndef CADP_CLI_EXIT_CODES_H_
#define CADP_CLI_EXIT_CODES_H_

#include "absl/status/status.h"

namespace cadp::cli {

// Process exit codes. These are a stable interface.
enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kData = 3,
  kDivergence = 4,
  kMechanism = 5,
  kSchema = 6,
  kDiagnostic = 7,
};

// Attaches `code` to a non-OK status (as a payload); OK passes through.
absl::Status WithExitCode(absl::Status status, ExitCode code);

// The attached code, else a default by status code: InvalidArgument -> 2,
// NotFound / DataLoss / OutOfRange -> 3, Aborted -> 4,
// FailedPrecondition -> 5, anything else -> 1.
int ExitCodeOf(const absl::Status& status);

}  // namespace cadp::cli

#endif  // CADP_CLI_EXIT_CODES_H_
