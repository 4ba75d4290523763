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

#include "cadp/numerics/mlp.h"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "cadp/numerics/ops.h"

namespace cadp::numerics {

Mlp::Mlp(MlpOptions options, Rng& rng) : options_(std::move(options)) {
  if (options_.sizes.size() < 2) {
    throw std::invalid_argument("Mlp needs at least input and output sizes");
  }
  const std::size_t layers = options_.sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = options_.sizes[l], out = options_.sizes[l + 1];
    std::vector<double> w(in * out, 0.0);
    if (!(options_.zero_init_output && l + 1 == layers)) {
      // Glorot uniform.
      const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
      for (double& v : w) v = bound * (2.0 * rng.Uniform() - 1.0);
    }
    parameters_.push_back(Tensor::FromValues({in, out}, std::move(w), true));
    parameters_.push_back(Tensor::Zeros({out}, true));
  }
}

Mlp::Mlp(MlpOptions options, std::vector<Tensor> parameters)
    : options_(std::move(options)), parameters_(std::move(parameters)) {
  const std::size_t layers = options_.sizes.size() - 1;
  if (options_.sizes.size() < 2 || parameters_.size() != 2 * layers) {
    throw std::invalid_argument("Mlp: parameter count does not match sizes");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const Shape w_shape = {options_.sizes[l], options_.sizes[l + 1]};
    const Shape b_shape = {options_.sizes[l + 1]};
    if (parameters_[2 * l].shape() != w_shape ||
        parameters_[2 * l + 1].shape() != b_shape) {
      throw std::invalid_argument("Mlp: parameter shape mismatch in layer " +
                                  std::to_string(l));
    }
    parameters_[2 * l].set_requires_grad(true);
    parameters_[2 * l + 1].set_requires_grad(true);
  }
}

Tensor Mlp::Forward(const Tensor& x) const {
  Tensor h = x;
  const std::size_t layers = parameters_.size() / 2;
  for (std::size_t l = 0; l < layers; ++l) {
    h = AddBias(Matmul(h, parameters_[2 * l]), parameters_[2 * l + 1]);
    if (l + 1 < layers) {
      h = options_.activation == Activation::kRelu ? Relu(h) : Tanh(h);
    }
  }
  return h;
}

Mlp Mlp::Clone() const {
  std::vector<Tensor> copies;
  copies.reserve(parameters_.size());
  for (const Tensor& p : parameters_) copies.push_back(p.Detach());
  return Mlp(options_, std::move(copies));
}

const char* ActivationName(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

bool ParseActivation(const std::string& name, Activation* out) {
  if (name == "relu") {
    *out = Activation::kRelu;
  } else if (name == "tanh") {
    *out = Activation::kTanh;
  } else {
    return false;
  }
  return true;
}

}  // namespace cadp::numerics
