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

#ifndef CADP_CLASSIFIER_CHECKPOINT_H_
#define CADP_CLASSIFIER_CHECKPOINT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/classifier/classifier.h"

namespace cadp::classifier {

inline constexpr int kClassifierCheckpointVersion = 1;

// What the private baseline was trained with, and what the accountant said.
struct DpSgdRecord {
  double noise_multiplier = 0.0;
  double clip_norm = 0.0;
  double delta = 0.0;
  std::size_t lot_size = 0;
  std::size_t dataset_size = 0;
  double epsilon = 0.0;
  bool vacuous = false;
};

// Where the training data came from, so evaluation can fill a report row.
struct TrainingProvenance {
  std::string method = "original";  // original | cadp | dpsgd
  std::optional<double> epsilon;
  std::optional<double> sensitivity;
  std::optional<double> flow_nll;
  double train_acc = 0.0;
};

struct ClassifierMetadata {
  uint64_t train_seed = 0;
  std::size_t steps = 0;
  std::vector<LossPoint> curve;
  std::optional<DpSgdRecord> dpsgd;
  TrainingProvenance provenance;
};

struct ClassifierCheckpoint {
  ClassifierModel model;
  ClassifierMetadata metadata;
};

absl::Status SaveClassifier(const std::string& path, const ClassifierModel& model,
                            const ClassifierMetadata& metadata);
absl::StatusOr<ClassifierCheckpoint> LoadClassifier(const std::string& path);

}  // namespace cadp::classifier

#endif  // CADP_CLASSIFIER_CHECKPOINT_H_
