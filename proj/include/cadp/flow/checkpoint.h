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

#ifndef CADP_FLOW_CHECKPOINT_H_
#define CADP_FLOW_CHECKPOINT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"
#include "cadp/flow/diagnostics.h"
#include "cadp/flow/flow.h"

namespace cadp::flow {

inline constexpr int kFlowCheckpointVersion = 1;

struct DiagnosticsSummary {
  bool passed = false;
  double max_abs_mean = 0.0;
  double min_variance = 0.0;
  double max_variance = 0.0;
  double max_abs_skew = 0.0;
  double max_abs_excess_kurtosis = 0.0;
  double max_abs_correlation = 0.0;
  std::vector<std::string> findings;
};

DiagnosticsSummary Summarize(const LatentDiagnostics& diagnostics);

struct FlowMetadata {
  uint64_t train_seed = 0;
  std::size_t steps = 0;
  // Best held-out mean NLL (nats per sample).
  double final_nll = 0.0;
  // Dequantization noise used in training (data units); diagnostics reuse it.
  double input_noise = 0.0;
  data::ConditionSpec condition;
  std::optional<DiagnosticsSummary> diagnostics;
};

struct FlowCheckpoint {
  FlowModel model;
  FlowMetadata metadata;
};

absl::Status SaveFlowCheckpoint(const std::string& path, const FlowModel& model,
                                const FlowMetadata& metadata);
absl::StatusOr<FlowCheckpoint> LoadFlowCheckpoint(const std::string& path);

}  // namespace cadp::flow

#endif  // CADP_FLOW_CHECKPOINT_H_
