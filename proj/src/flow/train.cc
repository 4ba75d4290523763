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

#include "cadp/flow/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "cadp/base/rng.h"
#include "cadp/numerics/ops.h"
#include "cadp/numerics/optim.h"

namespace cadp::flow {
namespace {

using numerics::Matrix;

data::FlowInputs Rows(const data::FlowInputs& in,
                      const std::vector<std::size_t>& rows) {
  return {in.x.SelectRows(rows), in.conditions.SelectRows(rows),
          in.condition_feature};
}

void CopyValues(const std::vector<Tensor>& from, std::vector<Tensor>& to) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    std::copy(from[i].values().begin(), from[i].values().end(),
              to[i].mutable_values().begin());
  }
}

std::vector<Tensor> Snapshot(const std::vector<Tensor>& params) {
  std::vector<Tensor> out;
  for (const Tensor& p : params) out.push_back(p.Detach());
  return out;
}

// Adds N(0, sigma^2) to every column except `skip`.
void AddNoise(Matrix& x, double sigma, const std::vector<bool>& skip, Rng& rng) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (!skip[c]) x(r, c) += sigma * rng.Normal();
    }
  }
}

}  // namespace

double MeanNll(const FlowModel& model, const Matrix& x, const Matrix& c) {
  // Chunked so that large held-out sets do not build huge intermediates.
  constexpr std::size_t kChunk = 1024;
  double total = 0.0;
  for (std::size_t begin = 0; begin < x.rows(); begin += kChunk) {
    std::vector<std::size_t> rows(std::min(kChunk, x.rows() - begin));
    std::iota(rows.begin(), rows.end(), begin);
    for (double ll : model.LogLikelihoodValues(x.SelectRows(rows), c.SelectRows(rows))) {
      total -= ll;
    }
  }
  return total / static_cast<double>(x.rows());
}

absl::StatusOr<FlowTrainResult> TrainMleOnInputs(
    FlowModel& model, const data::FlowInputs& train,
    const data::FlowInputs& heldout, const FlowTrainConfig& config) {
  if (train.x.rows() == 0 || heldout.x.rows() == 0) {
    return absl::InvalidArgumentError("flow training needs non-empty splits");
  }
  if (train.x.cols() != model.dim() || train.conditions.cols() != model.cond_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "data has dim ", train.x.cols(), " / cond ", train.conditions.cols(),
        "; model expects ", model.dim(), " / ", model.cond_dim()));
  }
  if (!(config.learning_rate > 0.0) || config.batch_size == 0 ||
      config.eval_every == 0 || !(config.input_noise >= 0.0)) {
    return absl::InvalidArgumentError(
        "flow training needs learning_rate > 0, batch_size > 0, eval_every > 0, "
        "input_noise >= 0");
  }
  std::vector<bool> noise_free(model.dim(), false);
  for (std::size_t c : config.noise_free_columns) {
    if (c >= model.dim()) return absl::InvalidArgumentError("noise_free column out of range");
    noise_free[c] = true;
  }
  Rng noise_rng(MixSeed(config.seed ^ 0x452821e638d01377ULL));
  Matrix heldout_x = heldout.x;
  if (config.input_noise > 0.0) {
    AddNoise(heldout_x, config.input_noise, noise_free, noise_rng);
  }
  std::vector<Tensor> params = model.parameters();
  numerics::Adam adam(params, {.learning_rate = config.learning_rate});
  Rng rng(MixSeed(config.seed ^ 0x13198a2e03707344ULL));

  const std::size_t n = train.x.rows();
  const std::size_t batch = std::min(config.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n;  // forces a shuffle on the first step

  FlowTrainResult result;
  result.train_rows = n;
  result.heldout_rows = heldout.x.rows();
  std::vector<Tensor> best;
  double window_nll = 0.0;
  std::size_t window_steps = 0;

  auto evaluate = [&](std::size_t step) -> absl::Status {
    double held;
    try {
      held = MeanNll(model, heldout_x, heldout.conditions);
    } catch (const numerics::NumericalError& e) {
      return absl::AbortedError(e.what());
    }
    result.curve.push_back(
        {step, window_steps ? window_nll / window_steps : held, held});
    window_nll = 0.0;
    window_steps = 0;
    if (best.empty() || held < result.best_heldout_nll) {
      result.best_heldout_nll = held;
      result.best_step = step;
      best = Snapshot(params);
    }
    return absl::OkStatus();
  };

  if (auto s = evaluate(0); !s.ok()) {
    return absl::AbortedError(absl::StrCat("untrained flow is not finite: ", s.message()));
  }
  for (std::size_t step = 1; step <= config.steps; ++step) {
    if (cursor + batch > n) {
      rng.Shuffle(std::span<std::size_t>(order));
      cursor = 0;
    }
    const std::vector<std::size_t> rows(order.begin() + cursor,
                                        order.begin() + cursor + batch);
    cursor += batch;
    try {
      adam.ZeroGrad();
      Matrix batch_x = train.x.SelectRows(rows);
      if (config.input_noise > 0.0) {
        AddNoise(batch_x, config.input_noise, noise_free, noise_rng);
      }
      const Tensor x = Tensor::FromMatrix(batch_x);
      const Tensor c = Tensor::FromMatrix(train.conditions.SelectRows(rows));
      const Tensor loss = numerics::Negate(numerics::Mean(model.LogLikelihood(x, c)));
      numerics::Backward(loss);
      std::vector<double> grad = numerics::FlattenGrads(params);
      double norm_sq = 0.0;
      for (double g : grad) norm_sq += g * g;
      if (!std::isfinite(norm_sq)) {
        throw numerics::NumericalError("non-finite gradient");
      }
      if (config.max_grad_norm > 0.0 && norm_sq > config.max_grad_norm * config.max_grad_norm) {
        const double f = config.max_grad_norm / std::sqrt(norm_sq);
        for (double& g : grad) g *= f;
      }
      adam.Step(grad);
      window_nll += loss.item();
      ++window_steps;
    } catch (const numerics::NumericalError& e) {
      numerics::Tape::ForThisThread().Clear();
      CopyValues(best, params);
      result.steps = step;
      return absl::AbortedError(absl::StrCat(
          "flow training diverged at step ", step, " (", e.what(),
          "); kept the best checkpoint from step ", result.best_step,
          ". Try a lower learning rate."));
    }
    for (const Tensor& p : params) {
      for (double v : p.values()) {
        if (!std::isfinite(v)) {
          CopyValues(best, params);
          return absl::AbortedError(absl::StrCat(
              "flow parameters became non-finite at step ", step,
              "; kept the best checkpoint. Try a lower learning rate."));
        }
      }
    }
    if (step % config.eval_every == 0 || step == config.steps) {
      if (auto s = evaluate(step); !s.ok()) {
        CopyValues(best, params);
        return absl::AbortedError(absl::StrCat(
            "held-out NLL not finite at step ", step, " (", s.message(),
            "); kept the best checkpoint. Try a lower learning rate."));
      }
    }
  }
  result.steps = config.steps;
  CopyValues(best, params);
  return result;
}

absl::StatusOr<FlowTrainResult> TrainMle(FlowModel& model,
                                         const data::LabeledDataset& data,
                                         const data::ConditionSpec& condition,
                                         const FlowTrainConfig& config) {
  if (data.empty()) return absl::InvalidArgumentError("empty training set");
  if (!(config.holdout_fraction > 0.0 && config.holdout_fraction < 1.0)) {
    return absl::InvalidArgumentError("holdout_fraction must be in (0, 1)");
  }
  auto inputs = data::MakeFlowInputs(data, condition);
  if (!inputs.ok()) return inputs.status();
  const std::size_t n = data.size();
  if (n < 2) return absl::InvalidArgumentError("flow training needs >= 2 rows");
  std::size_t held = static_cast<std::size_t>(std::llround(config.holdout_fraction * n));
  held = std::clamp<std::size_t>(held, 1, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(MixSeed(config.seed ^ 0xa4093822299f31d0ULL));
  rng.Shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> held_rows(order.begin(), order.begin() + held);
  std::vector<std::size_t> train_rows(order.begin() + held, order.end());
  std::sort(held_rows.begin(), held_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  FlowTrainConfig with_mask = config;
  std::size_t col = 0;
  for (std::size_t f = 0; f < data.dim(); ++f) {
    if (inputs->condition_feature == f) continue;
    if (data.schema[f].kind == data::FeatureKind::kBinary) {
      with_mask.noise_free_columns.push_back(col);
    }
    ++col;
  }
  return TrainMleOnInputs(model, Rows(*inputs, train_rows),
                          Rows(*inputs, held_rows), with_mask);
}

}  // namespace cadp::flow
