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

#ifndef CADP_FLOW_FLOW_H_
#define CADP_FLOW_FLOW_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cadp/numerics/matrix.h"
#include "cadp/numerics/mlp.h"
#include "cadp/numerics/tensor.h"

namespace cadp::flow {

using numerics::Matrix;
using numerics::Tensor;

enum class CouplingKind {
  // Volume preserving: log-scales are centred per sample, so log|det J| = 0.
  kGin,
  // Free affine scales; log|det J| is the sum of clamped log-scales.
  kAffineGlow,
};

const char* CouplingKindName(CouplingKind kind);
absl::StatusOr<CouplingKind> ParseCouplingKind(const std::string& name);

// Output of one block in the block's own (permuted) coordinates.
struct BlockOutput {
  Tensor y;
  // [batch x d2] log-scales actually applied (centred for GIN).
  Tensor log_scale;
};

// One-sided affine coupling preceded by a fixed column permutation:
//   u = x[:, perm];  u = (u1, u2) with u1 the first floor(d/2) columns;
//   (s_raw, t) = subnet(u1 ++ c);  s = clamp * tanh(s_raw / clamp);
//   y = (u1, u2 * exp(s_hat) + t)  with s_hat = s - rowmean(s) for GIN.
class CouplingBlock {
 public:
  CouplingBlock(CouplingKind kind, std::size_t dim, std::size_t cond_dim,
                std::vector<std::size_t> permutation, numerics::Mlp subnet,
                double clamp);

  BlockOutput Forward(const Tensor& x, const Tensor& c) const;
  Matrix Inverse(const Matrix& y, const Matrix& c) const;

  CouplingKind kind() const { return kind_; }
  std::size_t split() const { return split_; }
  const std::vector<std::size_t>& permutation() const { return permutation_; }
  const numerics::Mlp& subnet() const { return subnet_; }
  numerics::Mlp& subnet() { return subnet_; }

 private:
  CouplingKind kind_;
  std::size_t dim_;
  std::size_t cond_dim_;
  std::size_t split_;
  std::vector<std::size_t> permutation_;
  numerics::Mlp subnet_;
  double clamp_;
};

struct FlowConfig {
  std::size_t dim = 0;
  std::size_t cond_dim = 0;
  // One entry per block, applied in order.
  std::vector<CouplingKind> blocks;
  std::vector<std::size_t> hidden = {128, 128};
  numerics::Activation activation = numerics::Activation::kRelu;
  double clamp = 2.0;
  // Inputs are divided by this before the first block (and multiplied back
  // after the inverse). A constant factor keeps the Jacobian determinant
  // constant, so GIN flows stay density-ratio preserving; it lets data with
  // tiny per-pixel spread (e.g. images in [0, 1]) reach a unit-scale latent.
  double input_scale = 1.0;
  // Drives both permutations and subnet initialization.
  uint64_t seed = 0;
};

absl::Status ValidateFlowConfig(const FlowConfig& config);

// Seed of block k's permutation; stored in checkpoints.
uint64_t PermutationSeed(uint64_t model_seed, std::size_t block);

// Seeded shuffle of 0..dim-1, redrawn until at least one index moves across
// the split point, so each block mixes the halves.
std::vector<std::size_t> DrawPermutation(std::size_t dim, uint64_t seed);

struct FlowForward {
  Tensor z;       // [batch x dim]
  Tensor logdet;  // [batch]
};

// Conditional normalizing flow x <-> z with a standard normal prior.
// Shape mismatches throw std::invalid_argument; non-finite activations throw
// numerics::NumericalError.
class FlowModel {
 public:
  // Fresh model; every block starts as the identity (zeroed last subnet
  // layer), so forward(x) is x permuted.
  static absl::StatusOr<FlowModel> Create(const FlowConfig& config);
  // From stored subnet parameters (concatenated block by block).
  static absl::StatusOr<FlowModel> FromParameters(
      const FlowConfig& config, const std::vector<Tensor>& parameters);

  FlowForward Forward(const Tensor& x, const Tensor& c) const;
  Matrix Inverse(const Matrix& z, const Matrix& c) const;
  // Per-sample log q(f(x, c)) + log|det J|.
  Tensor LogLikelihood(const Tensor& x, const Tensor& c) const;

  // Gradient-free conveniences.
  Matrix Encode(const Matrix& x, const Matrix& c) const;
  std::vector<double> LogLikelihoodValues(const Matrix& x,
                                          const Matrix& c) const;

  std::vector<Tensor> parameters() const;
  const FlowConfig& config() const { return config_; }
  const std::vector<CouplingBlock>& blocks() const { return blocks_; }
  std::size_t dim() const { return config_.dim; }
  std::size_t cond_dim() const { return config_.cond_dim; }
  // All blocks GIN: the Jacobian determinant is the same constant for every
  // input (exactly 1 when input_scale is 1).
  bool volume_preserving() const;

  FlowModel Clone() const;

 private:
  FlowModel(FlowConfig config, std::vector<CouplingBlock> blocks)
      : config_(std::move(config)), blocks_(std::move(blocks)) {}

  void CheckShapes(std::size_t x_rows, std::size_t x_cols, std::size_t c_rows,
                   std::size_t c_cols) const;

  FlowConfig config_;
  std::vector<CouplingBlock> blocks_;
};

// log N(z; 0, I) per row: -(d/2) log(2 pi) - |z|^2 / 2.
Tensor StandardNormalLogDensity(const Tensor& z);

}  // namespace cadp::flow

#endif  // CADP_FLOW_FLOW_H_
