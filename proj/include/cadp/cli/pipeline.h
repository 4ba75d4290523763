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

#ifndef CADP_CLI_PIPELINE_H_
#define CADP_CLI_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cadp/classifier/checkpoint.h"
#include "cadp/classifier/classifier.h"
#include "cadp/cli/config.h"
#include "cadp/data/dataset.h"
#include "cadp/dpsgd/dpsgd.h"
#include "cadp/flow/checkpoint.h"
#include "cadp/flow/flow.h"
#include "cadp/flow/train.h"
#include "cadp/privacy/mechanism.h"

// The steps shared by the single commands and the sweep.
namespace cadp::cli {

struct TrainedFlow {
  flow::FlowModel model;
  flow::FlowMetadata metadata;
  flow::FlowTrainResult result;
};

// Fits the config's flow preset by maximum likelihood and records latent
// diagnostics, measured on a dequantized copy of `train`. Divergence is
// kAborted.
absl::StatusOr<TrainedFlow> TrainFlowOn(const ExperimentConfig& config,
                                        const data::LabeledDataset& train, uint64_t seed);

struct PrivatizeRequest {
  double epsilon = 1.0;
  double sensitivity = 1.0;
  uint64_t seed = 0;
  bool add_noise = true;
};

absl::StatusOr<privacy::PrivateDataset> PrivatizeWith(const flow::FlowModel& model,
                                                      const data::ConditionSpec& condition,
                                                      const PrivacyConfig& privacy,
                                                      const data::LabeledDataset& data,
                                                      const PrivatizeRequest& request);

struct TrainedClassifier {
  classifier::ClassifierModel model;
  classifier::ClassifierMetadata metadata;
  std::vector<std::string> warnings;
};

// Plain training, or DP-SGD when `dp` is set. metadata.provenance.method and
// train_acc are filled in ("original" or "dpsgd"); callers override the
// method for privatized data.
absl::StatusOr<TrainedClassifier> TrainClassifierOn(
    const classifier::ClassifierConfig& config, const data::LabeledDataset& train,
    uint64_t seed, const std::optional<dpsgd::DpSgdConfig>& dp = std::nullopt);

// DP-SGD settings matching the classifier preset: lot = min(batch, n), same
// steps and learning rate.
dpsgd::DpSgdConfig DpSgdConfigFor(const ExperimentConfig& config, std::size_t n,
                                  double noise_multiplier);

}  // namespace cadp::cli

#endif  // CADP_CLI_PIPELINE_H_
