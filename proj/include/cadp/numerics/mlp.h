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

#ifndef CADP_NUMERICS_MLP_H_
#define CADP_NUMERICS_MLP_H_

#include <cstddef>
#include <string>
#include <vector>

#include "cadp/base/rng.h"
#include "cadp/numerics/tensor.h"

namespace cadp::numerics {

enum class Activation { kRelu, kTanh };

struct MlpOptions {
  // Layer widths: input, hidden..., output. At least two entries.
  std::vector<std::size_t> sizes;
  Activation activation = Activation::kRelu;
  // Zero the last weight matrix (and bias), so the network outputs 0.
  bool zero_init_output = false;
};

// Fully connected network: Linear -> act -> ... -> Linear. Parameters are
// stored as [weight_0, bias_0, weight_1, bias_1, ...], weights [in x out].
class Mlp {
 public:
  Mlp(MlpOptions options, Rng& rng);
  // Rebuilds from stored parameters (e.g. a checkpoint). Shapes are checked.
  Mlp(MlpOptions options, std::vector<Tensor> parameters);

  Tensor Forward(const Tensor& x) const;

  const MlpOptions& options() const { return options_; }
  const std::vector<Tensor>& parameters() const { return parameters_; }
  std::vector<Tensor>& parameters() { return parameters_; }

  // Deep copy (parameters do not share storage with this network).
  Mlp Clone() const;

 private:
  MlpOptions options_;
  std::vector<Tensor> parameters_;
};

const char* ActivationName(Activation activation);
bool ParseActivation(const std::string& name, Activation* out);

}  // namespace cadp::numerics

#endif  // CADP_NUMERICS_MLP_H_
