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

#ifndef CADP_NUMERICS_OPTIM_H_
#define CADP_NUMERICS_OPTIM_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cadp/numerics/tensor.h"

namespace cadp::numerics {

// Concatenated gradients in parameter order; absent gradients count as zero.
std::vector<double> FlattenGrads(std::span<const Tensor> params);
std::size_t ParameterCount(std::span<const Tensor> params);

// First-order optimizer over a fixed parameter list. Step() consumes a flat
// gradient laid out as FlattenGrads() would produce it.
class Optimizer {
 public:
  explicit Optimizer(std::vector<Tensor> params);
  virtual ~Optimizer() = default;

  virtual void Step(std::span<const double> flat_grad) = 0;
  void StepFromGrads() { Step(FlattenGrads(params_)); }
  void ZeroGrad();

  const std::vector<Tensor>& params() const { return params_; }

 protected:
  std::vector<Tensor> params_;
  std::size_t total_ = 0;
};

class Sgd : public Optimizer {
 public:
  Sgd(std::vector<Tensor> params, double learning_rate);
  void Step(std::span<const double> flat_grad) override;

 private:
  double learning_rate_;
};

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam : public Optimizer {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options);
  void Step(std::span<const double> flat_grad) override;

 private:
  AdamOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  long step_ = 0;
};

enum class OptimizerKind { kAdam, kSgd };

std::unique_ptr<Optimizer> MakeOptimizer(OptimizerKind kind,
                                         std::vector<Tensor> params,
                                         double learning_rate);

}  // namespace cadp::numerics

#endif  // CADP_NUMERICS_OPTIM_H_
