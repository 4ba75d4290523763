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

#include "cadp/numerics/optim.h"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cadp::numerics {

std::size_t ParameterCount(std::span<const Tensor> params) {
  std::size_t n = 0;
  for (const Tensor& p : params) n += p.size();
  return n;
}

std::vector<double> FlattenGrads(std::span<const Tensor> params) {
  std::vector<double> flat;
  flat.reserve(ParameterCount(params));
  for (const Tensor& p : params) {
    if (p.has_grad()) {
      flat.insert(flat.end(), p.grad().begin(), p.grad().end());
    } else {
      flat.insert(flat.end(), p.size(), 0.0);
    }
  }
  return flat;
}

Optimizer::Optimizer(std::vector<Tensor> params)
    : params_(std::move(params)), total_(ParameterCount(params_)) {}

void Optimizer::ZeroGrad() {
  for (Tensor& p : params_) p.ZeroGrad();
}

Sgd::Sgd(std::vector<Tensor> params, double learning_rate)
    : Optimizer(std::move(params)), learning_rate_(learning_rate) {}

void Sgd::Step(std::span<const double> flat_grad) {
  if (flat_grad.size() != total_) {
    throw std::invalid_argument("Sgd::Step: gradient size mismatch");
  }
  std::size_t offset = 0;
  for (Tensor& p : params_) {
    auto values = p.mutable_values();
    for (double& v : values) v -= learning_rate_ * flat_grad[offset++];
  }
}

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : Optimizer(std::move(params)),
      options_(options),
      m_(total_, 0.0),
      v_(total_, 0.0) {}

void Adam::Step(std::span<const double> flat_grad) {
  if (flat_grad.size() != total_) {
    throw std::invalid_argument("Adam::Step: gradient size mismatch");
  }
  ++step_;
  const double bias1 = 1.0 - std::pow(options_.beta1, step_);
  const double bias2 = 1.0 - std::pow(options_.beta2, step_);
  std::size_t offset = 0;
  for (Tensor& p : params_) {
    auto values = p.mutable_values();
    for (double& v : values) {
      const double g = flat_grad[offset];
      m_[offset] = options_.beta1 * m_[offset] + (1.0 - options_.beta1) * g;
      v_[offset] = options_.beta2 * v_[offset] + (1.0 - options_.beta2) * g * g;
      const double m_hat = m_[offset] / bias1;
      const double v_hat = v_[offset] / bias2;
      v -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
      ++offset;
    }
  }
}

std::unique_ptr<Optimizer> MakeOptimizer(OptimizerKind kind,
                                         std::vector<Tensor> params,
                                         double learning_rate) {
  switch (kind) {
    case OptimizerKind::kAdam:
      return std::make_unique<Adam>(std::move(params),
                                    AdamOptions{.learning_rate = learning_rate});
    case OptimizerKind::kSgd:
      return std::make_unique<Sgd>(std::move(params), learning_rate);
  }
  throw std::invalid_argument("unknown optimizer kind");
}

}  // namespace cadp::numerics
