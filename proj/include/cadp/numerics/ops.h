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

#ifndef CADP_NUMERICS_OPS_H_
#define CADP_NUMERICS_OPS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cadp/numerics/tensor.h"

namespace cadp::numerics {

// Elementwise arithmetic. Binary ops accept equal shapes or a size-1 operand
// on either side; anything else throws std::invalid_argument.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Exp(const Tensor& a);
// Throws std::domain_error on any non-positive entry.
Tensor Log(const Tensor& a);
Tensor Tanh(const Tensor& a);
Tensor Relu(const Tensor& a);
Tensor Negate(const Tensor& a);
Tensor Scale(const Tensor& a, double factor);

// [m x k] * [k x n].
Tensor Matmul(const Tensor& a, const Tensor& b);

enum class ReduceOp { kSum, kMean, kL1Norm, kL2NormSq };

// Reduces all entries (no axis) to a scalar, or one axis of a 1-D/2-D tensor.
// The L1 subgradient at exactly zero is 0.
Tensor Reduce(ReduceOp op, const Tensor& a,
              std::optional<std::size_t> axis = std::nullopt);
inline Tensor Sum(const Tensor& a) { return Reduce(ReduceOp::kSum, a); }
inline Tensor Mean(const Tensor& a) { return Reduce(ReduceOp::kMean, a); }

// a[B x n] + bias[n], broadcast over rows.
Tensor AddBias(const Tensor& a, const Tensor& bias);

// Columns [begin, end) of a 2-D tensor.
Tensor SliceCols(const Tensor& a, std::size_t begin, std::size_t end);

// [B x n] ++ [B x m] -> [B x (n + m)].
Tensor ConcatCols(const Tensor& a, const Tensor& b);

// out[:, j] = a[:, perm[j]].
Tensor PermuteCols(const Tensor& a, std::span<const std::size_t> perm);

// Subtracts each row's mean from that row.
Tensor CenterRows(const Tensor& a);

// Mean over rows of -log softmax(logits)[label]. Labels index columns.
Tensor SoftmaxCrossEntropy(const Tensor& logits, std::span<const int> labels);

// Row-wise softmax (not recorded).
Matrix Softmax(const Tensor& logits);

}  // namespace cadp::numerics

#endif  // CADP_NUMERICS_OPS_H_
