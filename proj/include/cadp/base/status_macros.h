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

#ifndef CADP_BASE_STATUS_MACROS_H_
#define CADP_BASE_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define CADP_STATUS_CONCAT_INNER_(x, y) x##y
#define CADP_STATUS_CONCAT_(x, y) CADP_STATUS_CONCAT_INNER_(x, y)

#define CADP_RETURN_IF_ERROR(expr)               \
  do {                                           \
    const absl::Status cadp_status_ = (expr);    \
    if (!cadp_status_.ok()) return cadp_status_; \
  } while (0)

#define CADP_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) return statusor.status();           \
  lhs = std::move(statusor).value()

// Evaluates `rexpr` (an absl::StatusOr<T>); on error returns its status from
// the enclosing function, otherwise moves the value into `lhs`.
#define CADP_ASSIGN_OR_RETURN(lhs, rexpr) \
  CADP_ASSIGN_OR_RETURN_IMPL_(            \
      CADP_STATUS_CONCAT_(cadp_statusor_, __LINE__), lhs, rexpr)

#endif  // CADP_BASE_STATUS_MACROS_H_
