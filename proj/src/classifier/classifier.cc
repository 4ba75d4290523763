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

#include "cadp/classifier/classifier.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "cadp/numerics/ops.h"

namespace cadp::classifier {
namespace {

numerics::MlpOptions NetOptions(const ClassifierConfig& config, std::size_t in,
                                std::size_t classes) {
  numerics::MlpOptions options;
  options.sizes.push_back(in);
  for (std::size_t l = 1; l < std::max<std::size_t>(config.depth, 1); ++l) {
    options.sizes.push_back(config.width);
  }
  options.sizes.push_back(classes);
  options.activation = config.activation;
  return options;
}

std::vector<Tensor> Snapshot(const std::vector<Tensor>& params) {
  std::vector<Tensor> out;
  for (const Tensor& p : params) out.push_back(p.Detach());
  return out;
}

void Restore(const std::vector<Tensor>& from, std::vector<Tensor>& to) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    std::copy(from[i].values().begin(), from[i].values().end(),
              to[i].mutable_values().begin());
  }
}

void FlattenGradsInto(std::span<const Tensor> params, std::vector<double>& out) {
  std::size_t offset = 0;
  for (const Tensor& p : params) {
    if (p.has_grad()) {
      std::copy(p.grad().begin(), p.grad().end(), out.begin() + offset);
    } else {
      std::fill_n(out.begin() + offset, p.size(), 0.0);
    }
    offset += p.size();
  }
}

}  // namespace

ClassifierModel ClassifierModel::Create(const ClassifierConfig& config,
                                        std::vector<data::Feature> schema,
                                        std::size_t num_classes) {
  Rng rng(MixSeed(config.seed ^ 0x082efa98ec4e6c89ULL));
  numerics::Mlp net(NetOptions(config, schema.size(), num_classes), rng);
  return ClassifierModel(config, std::move(schema), num_classes, std::move(net));
}

absl::StatusOr<ClassifierModel> ClassifierModel::FromParameters(
    const ClassifierConfig& config, std::vector<data::Feature> schema,
    std::size_t num_classes, std::vector<Tensor> parameters) {
  try {
    numerics::Mlp net(NetOptions(config, schema.size(), num_classes),
                      std::move(parameters));
    return ClassifierModel(config, std::move(schema), num_classes, std::move(net));
  } catch (const std::invalid_argument& e) {
    return absl::InvalidArgumentError(e.what());
  }
}

Matrix ClassifierModel::Probabilities(const Matrix& x) const {
  numerics::NoGradGuard no_grad;
  return numerics::Softmax(Logits(Tensor::FromMatrix(x)));
}

std::vector<int> ClassifierModel::Predict(const Matrix& x) const {
  numerics::NoGradGuard no_grad;
  const Matrix logits = Logits(Tensor::FromMatrix(x)).ToMatrix();
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = logits.row(r);
    // max_element returns the first maximum.
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

void MeanAggregator::Begin(std::size_t num_parameters) {
  sum_.assign(num_parameters, 0.0);
}

void MeanAggregator::Add(std::span<const double> gradient) {
  for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += gradient[i];
}

std::vector<double> MeanAggregator::Finish(std::size_t batch_size, Rng&) {
  const double n = static_cast<double>(batch_size);
  for (double& v : sum_) v /= n;
  return std::move(sum_);
}

std::vector<double> ExampleGradient(const ClassifierModel& model,
                                    std::span<const double> x, int label) {
  std::vector<Tensor> params = model.parameters();
  for (Tensor& p : params) p.ZeroGrad();
  const Tensor input = Tensor::FromValues({1, x.size()}, {x.begin(), x.end()});
  const int labels[] = {label};
  numerics::Backward(numerics::SoftmaxCrossEntropy(model.Logits(input), labels));
  return numerics::FlattenGrads(params);
}

absl::StatusOr<TrainResult> TrainClassifier(ClassifierModel& model,
                                            const data::LabeledDataset& data,
                                            GradientAggregator* aggregator) {
  const ClassifierConfig& config = model.config();
  if (data.empty()) return absl::InvalidArgumentError("empty training set");
  if (data.dim() != model.input_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "training data has ", data.dim(), " features, model expects ", model.input_dim()));
  }
  for (int y : data.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= model.num_classes()) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", y, " outside [0, ", model.num_classes(), ")"));
    }
  }
  if (config.batch_size == 0 || config.log_every == 0 || !(config.learning_rate > 0)) {
    return absl::InvalidArgumentError(
        "classifier training needs batch_size > 0, log_every > 0, learning_rate > 0");
  }
  TrainResult result;
  if (std::all_of(data.labels.begin(), data.labels.end(),
                  [&](int y) { return y == data.labels.front(); })) {
    result.warnings.push_back(absl::StrCat(
        "training set has a single class (", data.labels.front(),
        "); the classifier is trivial"));
  }

  std::vector<Tensor> params = model.parameters();
  auto optimizer = numerics::MakeOptimizer(config.optimizer, params, config.learning_rate);
  Rng batch_rng(MixSeed(config.seed ^ 0x3f84d5b5b5470917ULL));
  Rng aggregator_rng(MixSeed(config.seed ^ 0x9216d5d98979fb1bULL));
  const std::size_t n = data.size();
  const std::size_t batch = std::min(config.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n;
  std::vector<Tensor> good = Snapshot(params);
  std::vector<double> gradient(numerics::ParameterCount(params));
  MeanAggregator mean;
  if (aggregator == nullptr) aggregator = &mean;
  double window = 0.0;
  std::size_t window_steps = 0;

  for (std::size_t step = 1; step <= config.steps; ++step) {
    if (cursor + batch > n) {
      batch_rng.Shuffle(std::span<std::size_t>(order));
      cursor = 0;
    }
    aggregator->Begin(gradient.size());
    double loss = 0.0;
    try {
      for (std::size_t k = 0; k < batch; ++k) {
        const std::size_t i = order[cursor + k];
        for (Tensor& p : params) p.ZeroGrad();
        const auto row = data.features.row(i);
        const Tensor input =
            Tensor::FromValues({1, data.dim()}, {row.begin(), row.end()});
        const int labels[] = {data.labels[i]};
        const Tensor l = numerics::SoftmaxCrossEntropy(model.Logits(input), labels);
        loss += l.item();
        numerics::Backward(l);
        FlattenGradsInto(params, gradient);
        aggregator->Add(gradient);
      }
    } catch (const numerics::NumericalError& e) {
      numerics::Tape::ForThisThread().Clear();
      Restore(good, params);
      result.steps = step;
      return absl::AbortedError(absl::StrCat(
          "classifier training diverged at step ", step, " (", e.what(),
          "); kept the snapshot from before. Try a lower learning rate."));
    }
    cursor += batch;
    const std::vector<double> update = aggregator->Finish(batch, aggregator_rng);
    if (!std::all_of(update.begin(), update.end(),
                     [](double v) { return std::isfinite(v); })) {
      ++result.skipped_steps;
      result.warnings.push_back(absl::StrCat("step ", step, ": non-finite gradient, skipped"));
      continue;
    }
    optimizer->Step(update);
    window += loss / static_cast<double>(batch);
    ++window_steps;
    if (step % config.log_every == 0 || step == config.steps) {
      result.curve.push_back({step, window / std::max<std::size_t>(window_steps, 1)});
      window = 0.0;
      window_steps = 0;
      good = Snapshot(params);
    }
  }
  result.steps = config.steps;
  return result;
}

absl::StatusOr<double> Evaluate(const ClassifierModel& model,
                                const data::LabeledDataset& test) {
  if (test.empty()) return absl::InvalidArgumentError("cannot evaluate on an empty test set");
  if (test.schema != model.schema()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "test schema (", test.dim(), " features) does not match the classifier's (",
        model.input_dim(), " features)"));
  }
  const std::vector<int> predicted = model.Predict(test.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == test.labels[i];
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace cadp::classifier
