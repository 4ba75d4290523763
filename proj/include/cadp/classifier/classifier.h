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

#ifndef CADP_CLASSIFIER_CLASSIFIER_H_
#define CADP_CLASSIFIER_CLASSIFIER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cadp/base/rng.h"
#include "cadp/data/dataset.h"
#include "cadp/numerics/matrix.h"
#include "cadp/numerics/mlp.h"
#include "cadp/numerics/optim.h"

namespace cadp::classifier {

using numerics::Matrix;
using numerics::Tensor;

struct ClassifierConfig {
  // Number of linear layers; depth - 1 hidden layers of `width` units.
  std::size_t depth = 2;
  std::size_t width = 256;
  numerics::Activation activation = numerics::Activation::kRelu;
  numerics::OptimizerKind optimizer = numerics::OptimizerKind::kAdam;
  double learning_rate = 5e-4;
  std::size_t batch_size = 512;
  std::size_t steps = 500;
  // Training loss is recorded (and a last-good snapshot kept) this often.
  std::size_t log_every = 10;
  uint64_t seed = 0;
};

// MLP over the dataset's features with a softmax output.
class ClassifierModel {
 public:
  static ClassifierModel Create(const ClassifierConfig& config,
                                std::vector<data::Feature> schema,
                                std::size_t num_classes);
  static absl::StatusOr<ClassifierModel> FromParameters(
      const ClassifierConfig& config, std::vector<data::Feature> schema,
      std::size_t num_classes, std::vector<Tensor> parameters);

  Tensor Logits(const Tensor& x) const { return net_.Forward(x); }
  Matrix Probabilities(const Matrix& x) const;
  // Argmax class per row; ties go to the lowest index.
  std::vector<int> Predict(const Matrix& x) const;

  std::vector<Tensor> parameters() const { return net_.parameters(); }
  const ClassifierConfig& config() const { return config_; }
  // Training settings only; the architecture fields must not change.
  ClassifierConfig& mutable_config() { return config_; }
  const std::vector<data::Feature>& schema() const { return schema_; }
  std::size_t input_dim() const { return schema_.size(); }
  std::size_t num_classes() const { return num_classes_; }

 private:
  ClassifierModel(ClassifierConfig config, std::vector<data::Feature> schema,
                  std::size_t num_classes, numerics::Mlp net)
      : config_(std::move(config)),
        schema_(std::move(schema)),
        num_classes_(num_classes),
        net_(std::move(net)) {}

  ClassifierConfig config_;
  std::vector<data::Feature> schema_;
  std::size_t num_classes_;
  numerics::Mlp net_;
};

// Consumes the per-example gradients of one batch (each flattened in
// parameter order) and produces the update direction handed to the optimizer.
// Gradients are streamed so a batch never holds more than one copy.
class GradientAggregator {
 public:
  virtual ~GradientAggregator() = default;
  virtual void Begin(std::size_t num_parameters) = 0;
  virtual void Add(std::span<const double> gradient) = 0;
  virtual std::vector<double> Finish(std::size_t batch_size, Rng& rng) = 0;
};

// Plain mean of the per-example gradients.
class MeanAggregator : public GradientAggregator {
 public:
  void Begin(std::size_t num_parameters) override;
  void Add(std::span<const double> gradient) override;
  std::vector<double> Finish(std::size_t batch_size, Rng& rng) override;

 private:
  std::vector<double> sum_;
};

struct LossPoint {
  std::size_t step = 0;
  double loss = 0.0;  // mean batch cross-entropy since the previous point
};

struct TrainResult {
  std::vector<LossPoint> curve;
  std::vector<std::string> warnings;
  std::size_t steps = 0;
  // Aggregator calls that returned a non-finite update (step skipped).
  std::size_t skipped_steps = 0;
};

// Minibatch training with per-example backward passes. Batches are drawn from
// seeded per-epoch shuffles. A non-finite loss aborts with kAborted and
// leaves the last good snapshot in `model`. A null aggregator means the mean.
absl::StatusOr<TrainResult> TrainClassifier(
    ClassifierModel& model, const data::LabeledDataset& data,
    GradientAggregator* aggregator = nullptr);

// Gradient of the cross-entropy of one example, flattened.
std::vector<double> ExampleGradient(const ClassifierModel& model,
                                    std::span<const double> x, int label);

// Fraction of argmax-correct predictions. Empty sets and schema mismatches
// are errors.
absl::StatusOr<double> Evaluate(const ClassifierModel& model,
                                const data::LabeledDataset& test);

}  // namespace cadp::classifier

#endif  // CADP_CLASSIFIER_CLASSIFIER_H_
