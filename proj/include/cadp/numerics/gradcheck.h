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

#ifndef CADP_NUMERICS_GRADCHECK_H_
#define CADP_NUMERICS_GRADCHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "cadp/numerics/tensor.h"

namespace cadp::numerics {

// Compares the tape gradient of `f` at `params` against central differences
// (f(p + h) - f(p - h)) / 2h and returns
//   max_i |analytic_i - numeric_i| / (|analytic_i| + 1e-8).
// Throws std::invalid_argument unless h > 0.
double FiniteDiffCheck(const std::function<Tensor(const Tensor&)>& f,
                       const Tensor& params, double h);

// Multi-tensor form: `loss_fn` reads the current values of `params` (leaf
// tensors with requires_grad set), which are perturbed in place and restored.
// With max_coords > 0 only that many coordinates per tensor are probed, chosen
// by `seed`.
double FiniteDiffCheck(const std::function<Tensor()>& loss_fn,
                       std::span<Tensor> params, double h,
                       std::size_t max_coords = 0, uint64_t seed = 0);

}  // namespace cadp::numerics

#endif  // CADP_NUMERICS_GRADCHECK_H_
