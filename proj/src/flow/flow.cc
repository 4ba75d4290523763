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

#include "cadp/flow/flow.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "absl/strings/str_cat.h"
#include "cadp/base/rng.h"
#include "cadp/numerics/ops.h"

namespace cadp::flow {

using numerics::NoGradGuard;
using numerics::Reduce;
using numerics::ReduceOp;

const char* CouplingKindName(CouplingKind kind) {
  return kind == CouplingKind::kGin ? "gin" : "affine_glow";
}

absl::StatusOr<CouplingKind> ParseCouplingKind(const std::string& name) {
  if (name == "gin" || name == "GIN") return CouplingKind::kGin;
  if (name == "affine_glow" || name == "glow" || name == "AFFINE_GLOW") {
    return CouplingKind::kAffineGlow;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown coupling kind '", name, "' (gin, affine_glow)"));
}

CouplingBlock::CouplingBlock(CouplingKind kind, std::size_t dim,
                             std::size_t cond_dim,
                             std::vector<std::size_t> permutation,
                             numerics::Mlp subnet, double clamp)
    : kind_(kind),
      dim_(dim),
      cond_dim_(cond_dim),
      split_(dim / 2),
      permutation_(std::move(permutation)),
      subnet_(std::move(subnet)),
      clamp_(clamp) {
  const auto& sizes = subnet_.options().sizes;
  if (permutation_.size() != dim_ || sizes.front() != split_ + cond_dim_ ||
      sizes.back() != 2 * (dim_ - split_)) {
    throw std::invalid_argument("CouplingBlock: subnet/permutation shape mismatch");
  }
}

BlockOutput CouplingBlock::Forward(const Tensor& x, const Tensor& c) const {
  using namespace numerics;  // NOLINT
  const std::size_t d2 = dim_ - split_;
  const Tensor u = PermuteCols(x, permutation_);
  const Tensor u1 = SliceCols(u, 0, split_);
  const Tensor u2 = SliceCols(u, split_, dim_);
  const Tensor h = subnet_.Forward(ConcatCols(u1, c));
  const Tensor s_raw = SliceCols(h, 0, d2);
  const Tensor t = SliceCols(h, d2, 2 * d2);
  Tensor s = Scale(Tanh(Scale(s_raw, 1.0 / clamp_)), clamp_);
  if (kind_ == CouplingKind::kGin) s = CenterRows(s);
  const Tensor y2 = Add(Mul(u2, Exp(s)), t);
  return {ConcatCols(u1, y2), s};
}

Matrix CouplingBlock::Inverse(const Matrix& y, const Matrix& c) const {
  const std::size_t n = y.rows(), d2 = dim_ - split_;
  Matrix in(n, split_ + cond_dim_);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < split_; ++j) in(r, j) = y(r, j);
    for (std::size_t j = 0; j < cond_dim_; ++j) in(r, split_ + j) = c(r, j);
  }
  Matrix h;
  {
    NoGradGuard no_grad;
    h = subnet_.Forward(Tensor::FromMatrix(in)).ToMatrix();
  }
  Matrix x(n, dim_);
  std::vector<double> s(d2);
  for (std::size_t r = 0; r < n; ++r) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d2; ++j) {
      s[j] = clamp_ * std::tanh(h(r, j) / clamp_);
      mean += s[j];
    }
    mean /= static_cast<double>(d2);
    for (std::size_t j = 0; j < split_; ++j) x(r, permutation_[j]) = y(r, j);
    for (std::size_t j = 0; j < d2; ++j) {
      const double sj = kind_ == CouplingKind::kGin ? s[j] - mean : s[j];
      const double v = (y(r, split_ + j) - h(r, d2 + j)) * std::exp(-sj);
      if (!std::isfinite(v)) {
        throw numerics::NumericalError(absl::StrCat(
            "flow inverse overflow at row ", r, " (check the clamp setting)"));
      }
      x(r, permutation_[split_ + j]) = v;
    }
  }
  return x;
}

absl::Status ValidateFlowConfig(const FlowConfig& config) {
  if (config.dim < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("flow needs dim >= 2, got ", config.dim));
  }
  if (config.cond_dim < 1) {
    return absl::InvalidArgumentError("flow needs cond_dim >= 1");
  }
  if (config.blocks.empty()) {
    return absl::InvalidArgumentError("flow needs at least one block");
  }
  if (!(config.clamp > 0.0) || !std::isfinite(config.clamp)) {
    return absl::InvalidArgumentError("flow clamp must be positive");
  }
  if (!(config.input_scale > 0.0) || !std::isfinite(config.input_scale)) {
    return absl::InvalidArgumentError("flow input_scale must be positive");
  }
  for (std::size_t h : config.hidden) {
    if (h == 0) return absl::InvalidArgumentError("hidden width must be > 0");
  }
  return absl::OkStatus();
}

uint64_t PermutationSeed(uint64_t model_seed, std::size_t block) {
  return MixSeed(MixSeed(model_seed) + block + 1);
}

std::vector<std::size_t> DrawPermutation(std::size_t dim, uint64_t seed) {
  std::vector<std::size_t> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  const std::size_t split = dim / 2;
  Rng rng(seed);
  for (;;) {
    rng.Shuffle(std::span<std::size_t>(perm));
    for (std::size_t j = 0; j < split; ++j) {
      if (perm[j] >= split) return perm;
    }
  }
}

namespace {

numerics::MlpOptions SubnetOptions(const FlowConfig& config) {
  const std::size_t split = config.dim / 2;
  numerics::MlpOptions options;
  options.sizes.push_back(split + config.cond_dim);
  for (std::size_t h : config.hidden) options.sizes.push_back(h);
  options.sizes.push_back(2 * (config.dim - split));
  options.activation = config.activation;
  options.zero_init_output = true;
  return options;
}

}  // namespace

absl::StatusOr<FlowModel> FlowModel::Create(const FlowConfig& config) {
  if (auto s = ValidateFlowConfig(config); !s.ok()) return s;
  Rng init(MixSeed(config.seed ^ 0x243f6a8885a308d3ULL));
  std::vector<CouplingBlock> blocks;
  for (std::size_t k = 0; k < config.blocks.size(); ++k) {
    blocks.emplace_back(config.blocks[k], config.dim, config.cond_dim,
                        DrawPermutation(config.dim, PermutationSeed(config.seed, k)),
                        numerics::Mlp(SubnetOptions(config), init), config.clamp);
  }
  return FlowModel(config, std::move(blocks));
}

absl::StatusOr<FlowModel> FlowModel::FromParameters(
    const FlowConfig& config, const std::vector<Tensor>& parameters) {
  if (auto s = ValidateFlowConfig(config); !s.ok()) return s;
  const numerics::MlpOptions options = SubnetOptions(config);
  const std::size_t per_block = 2 * (options.sizes.size() - 1);
  if (parameters.size() != per_block * config.blocks.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("flow expects ", per_block * config.blocks.size(),
                     " parameter arrays, got ", parameters.size()));
  }
  std::vector<CouplingBlock> blocks;
  try {
    for (std::size_t k = 0; k < config.blocks.size(); ++k) {
      std::vector<Tensor> p(parameters.begin() + k * per_block,
                            parameters.begin() + (k + 1) * per_block);
      blocks.emplace_back(config.blocks[k], config.dim, config.cond_dim,
                          DrawPermutation(config.dim, PermutationSeed(config.seed, k)),
                          numerics::Mlp(options, std::move(p)), config.clamp);
    }
  } catch (const std::invalid_argument& e) {
    return absl::InvalidArgumentError(e.what());
  }
  return FlowModel(config, std::move(blocks));
}

void FlowModel::CheckShapes(std::size_t x_rows, std::size_t x_cols,
                            std::size_t c_rows, std::size_t c_cols) const {
  if (x_cols != config_.dim || c_cols != config_.cond_dim || x_rows != c_rows) {
    throw std::invalid_argument(absl::StrCat(
        "flow expects x [n x ", config_.dim, "] and c [n x ", config_.cond_dim,
        "], got [", x_rows, " x ", x_cols, "] and [", c_rows, " x ", c_cols,
        "]"));
  }
}

FlowForward FlowModel::Forward(const Tensor& x, const Tensor& c) const {
  if (x.ndim() != 2 || c.ndim() != 2) {
    throw std::invalid_argument("flow inputs must be 2-D");
  }
  CheckShapes(x.dim(0), x.dim(1), c.dim(0), c.dim(1));
  Tensor h = x;
  Tensor logdet = Tensor::Zeros({x.dim(0)});
  bool any_affine = false;
  if (config_.input_scale != 1.0) {
    h = numerics::Scale(x, 1.0 / config_.input_scale);
    logdet = Tensor::Full({x.dim(0)},
                          -static_cast<double>(config_.dim) * std::log(config_.input_scale));
    any_affine = true;
  }
  for (const CouplingBlock& block : blocks_) {
    BlockOutput out = block.Forward(h, c);
    h = out.y;
    if (block.kind() == CouplingKind::kAffineGlow) {
      const Tensor block_logdet = Reduce(ReduceOp::kSum, out.log_scale, 1);
      logdet = any_affine ? numerics::Add(logdet, block_logdet) : block_logdet;
      any_affine = true;
    }
  }
  return {h, logdet};
}

Matrix FlowModel::Inverse(const Matrix& z, const Matrix& c) const {
  CheckShapes(z.rows(), z.cols(), c.rows(), c.cols());
  Matrix x = z;
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
    x = it->Inverse(x, c);
  }
  if (config_.input_scale != 1.0) {
    for (double& v : x.mutable_values()) v *= config_.input_scale;
  }
  return x;
}

Tensor StandardNormalLogDensity(const Tensor& z) {
  const double d = static_cast<double>(z.dim(1));
  const Tensor half_sq = numerics::Scale(Reduce(ReduceOp::kL2NormSq, z, 1), -0.5);
  return numerics::Add(half_sq,
                       Tensor::Scalar(-0.5 * d * std::log(2.0 * std::numbers::pi)));
}

Tensor FlowModel::LogLikelihood(const Tensor& x, const Tensor& c) const {
  const FlowForward f = Forward(x, c);
  return numerics::Add(StandardNormalLogDensity(f.z), f.logdet);
}

Matrix FlowModel::Encode(const Matrix& x, const Matrix& c) const {
  NoGradGuard no_grad;
  return Forward(Tensor::FromMatrix(x), Tensor::FromMatrix(c)).z.ToMatrix();
}

std::vector<double> FlowModel::LogLikelihoodValues(const Matrix& x,
                                                   const Matrix& c) const {
  NoGradGuard no_grad;
  const Tensor ll = LogLikelihood(Tensor::FromMatrix(x), Tensor::FromMatrix(c));
  return {ll.values().begin(), ll.values().end()};
}

std::vector<Tensor> FlowModel::parameters() const {
  std::vector<Tensor> out;
  for (const CouplingBlock& block : blocks_) {
    for (const Tensor& p : block.subnet().parameters()) out.push_back(p);
  }
  return out;
}

bool FlowModel::volume_preserving() const {
  for (const CouplingBlock& block : blocks_) {
    if (block.kind() != CouplingKind::kGin) return false;
  }
  return true;
}

FlowModel FlowModel::Clone() const {
  std::vector<Tensor> copies;
  for (const Tensor& p : parameters()) copies.push_back(p.Detach());
  return *FromParameters(config_, copies);
}

}  // namespace cadp::flow
