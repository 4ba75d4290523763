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

#ifndef CADP_FLOW_TRAIN_H_
#define CADP_FLOW_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"
#include "cadp/flow/flow.h"

namespace cadp::flow {

struct FlowTrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  std::size_t steps = 2000;
  // Fraction of the data held out for model selection (at least one row).
  double holdout_fraction = 0.1;
  // Held-out NLL is evaluated every this many steps and after the last one.
  std::size_t eval_every = 100;
  // Global gradient-norm clip; 0 disables.
  double max_grad_norm = 0.0;
  // Std of Gaussian dequantization noise added to every training batch (fresh
  // draws each step) and, once, to the held-out split. 0 disables.
  double input_noise = 0.0;
  // Flow-input columns that never get noise (binary features). TrainMle
  // fills this from the schema.
  std::vector<std::size_t> noise_free_columns;
  uint64_t seed = 0;
};

struct FlowCurvePoint {
  std::size_t step = 0;
  double train_nll = 0.0;    // mean over the batches since the last point
  double heldout_nll = 0.0;  // mean over the held-out split
};

struct FlowTrainResult {
  std::vector<FlowCurvePoint> curve;
  std::size_t best_step = 0;
  double best_heldout_nll = 0.0;
  std::size_t steps = 0;
  std::size_t train_rows = 0;
  std::size_t heldout_rows = 0;
};

// Maximum likelihood with Adam on mean NLL (nats per sample). The returned
// model state is the best held-out checkpoint. If a step produces non-finite
// values, training stops with kAborted and `model` keeps the last best
// parameters.
absl::StatusOr<FlowTrainResult> TrainMle(FlowModel& model,
                                         const data::LabeledDataset& data,
                                         const data::ConditionSpec& condition,
                                         const FlowTrainConfig& config);

// Same, on pre-built flow inputs with an explicit held-out split.
absl::StatusOr<FlowTrainResult> TrainMleOnInputs(
    FlowModel& model, const data::FlowInputs& train,
    const data::FlowInputs& heldout, const FlowTrainConfig& config);

// Mean negative log-likelihood (nats per sample).
double MeanNll(const FlowModel& model, const Matrix& x, const Matrix& c);

}  // namespace cadp::flow

#endif  // CADP_FLOW_TRAIN_H_
