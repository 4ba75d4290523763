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

#include "cadp/dpsgd/dpsgd.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "cadp/numerics/ops.h"
#include "cadp/numerics/optim.h"

namespace cadp::dpsgd {

using numerics::Tensor;

absl::Status ValidateDpSgdConfig(const DpSgdConfig& c) {
  if (!(c.clip_norm > 0)) return absl::InvalidArgumentError("clip_norm must be > 0");
  if (!(c.noise_multiplier >= 0) || std::isinf(c.noise_multiplier)) {
    return absl::InvalidArgumentError("noise_multiplier must be finite and >= 0");
  }
  if (c.lot_size == 0 || c.steps == 0) {
    return absl::InvalidArgumentError("lot_size and steps must be positive");
  }
  if (!(c.learning_rate > 0) || std::isinf(c.learning_rate)) {
    return absl::InvalidArgumentError("learning_rate must be finite and > 0");
  }
  if (!(c.delta > 0 && c.delta < 1)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  return absl::OkStatus();
}

std::vector<std::string> DpSgdWarnings(const DpSgdConfig& c, std::size_t n) {
  std::vector<std::string> out;
  if (n > 0 && c.delta >= 1.0 / static_cast<double>(n)) {
    out.push_back(absl::StrCat("delta=", c.delta, " is not below 1/N=",
                               1.0 / static_cast<double>(n),
                               "; the guarantee permits leaking whole records"));
  }
  if (c.noise_multiplier == 0) out.push_back("noise_multiplier=0: no privacy");
  if (std::isinf(c.clip_norm)) out.push_back("clip_norm=inf: sensitivity is unbounded");
  if (n > 0 && c.lot_size > n) {
    out.push_back(absl::StrCat("lot_size ", c.lot_size, " exceeds the ", n,
                               " training rows; lots are capped at N"));
  }
  return out;
}

double PerSampleClip(std::span<double> grad, double clip_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > clip_norm) {
    const double factor = clip_norm / norm;
    for (double& g : grad) g *= factor;
  }
  return norm;
}

DpSgdAggregator::DpSgdAggregator(double clip_norm, double noise_multiplier)
    : clip_norm_(clip_norm), noise_multiplier_(noise_multiplier) {}

void DpSgdAggregator::Begin(std::size_t num_parameters) {
  sum_.assign(num_parameters, 0.0);
  scratch_.resize(num_parameters);
}

void DpSgdAggregator::Add(std::span<const double> gradient) {
  std::copy(gradient.begin(), gradient.end(), scratch_.begin());
  const double norm = PerSampleClip(scratch_, clip_norm_);
  if (norm > clip_norm_) ++clipped_count_;
  max_clipped_norm_ = std::max(max_clipped_norm_, std::min(norm, clip_norm_));
  for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += scratch_[i];
}

std::vector<double> DpSgdAggregator::Finish(std::size_t batch_size, Rng& rng) {
  // Skipped entirely at sigma = 0 so the result matches the plain mean bit
  // for bit (sigma * inf would also be NaN).
  if (noise_multiplier_ > 0) {
    const double stddev = noise_multiplier_ * clip_norm_;
    for (double& v : sum_) v += stddev * rng.Normal();
  }
  const double n = static_cast<double>(batch_size);
  for (double& v : sum_) v /= n;
  return std::move(sum_);
}

absl::StatusOr<StepResult> DpSgdStep(classifier::ClassifierModel& model,
                                     const data::LabeledDataset& batch,
                                     const DpSgdConfig& config, Rng& rng) {
  if (absl::Status s = ValidateDpSgdConfig(config); !s.ok()) return s;
  if (batch.size() != config.lot_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch has ", batch.size(), " rows, lot_size is ", config.lot_size));
  }
  if (batch.dim() != model.input_dim()) {
    return absl::InvalidArgumentError("batch features do not match the model");
  }
  std::vector<Tensor> params = model.parameters();
  DpSgdAggregator aggregator(config.clip_norm, config.noise_multiplier);
  aggregator.Begin(numerics::ParameterCount(params));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::vector<double> g;
    try {
      g = classifier::ExampleGradient(model, batch.features.row(i), batch.labels[i]);
    } catch (const numerics::NumericalError& e) {
      numerics::Tape::ForThisThread().Clear();
      return StepResult{true, absl::StrCat("sample ", i, ": non-finite gradient (",
                                           e.what(), "); step skipped")};
    }
    aggregator.Add(g);
  }
  const std::vector<double> update = aggregator.Finish(batch.size(), rng);
  if (!std::all_of(update.begin(), update.end(), [](double v) { return std::isfinite(v); })) {
    return StepResult{true, "non-finite update; step skipped"};
  }
  numerics::Sgd sgd(params, config.learning_rate);
  sgd.Step(update);
  return StepResult{};
}

namespace {

// ln(1 + q (e^a - 1)) without overflow for large a.
double AmplifiedEpsilon(double a, double q) {
  if (q >= 1.0) return a;
  if (a < 1.0) return std::log1p(q * std::expm1(a));
  return a + std::log(q + (1.0 - q) * std::exp(-a));
}

double GaussianEpsilon(double sigma, double delta0) {
  return std::sqrt(2.0 * std::log(1.25 / delta0)) / sigma;
}

}  // namespace

absl::StatusOr<AccountantResult> SimpleAccountant(double sigma, std::size_t lot,
                                                  std::size_t n, std::size_t steps,
                                                  double delta) {
  if (!(sigma > 0) || std::isinf(sigma) || lot == 0 || n == 0 || steps == 0 ||
      !(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        "accountant needs sigma > 0, positive lot/N/steps and delta in (0, 1)");
  }
  const double q = std::min(1.0, static_cast<double>(lot) / static_cast<double>(n));
  const double t = static_cast<double>(steps);

  // Linear: T steps of (eps_q, q delta0) with T q delta0 = delta.
  const double eq_basic = AmplifiedEpsilon(GaussianEpsilon(sigma, delta / (t * q)), q);
  AccountantResult r;
  r.basic = t * eq_basic;

  // Advanced: half of delta pays for the per-step failures, half for the slack.
  const double slack = delta / 2;
  const double eq = AmplifiedEpsilon(GaussianEpsilon(sigma, delta / (2 * t * q)), q);
  r.advanced = eq * std::sqrt(2 * t * std::log(1 / slack)) + t * eq * std::expm1(eq);
  if (!std::isfinite(r.advanced)) r.advanced = std::numeric_limits<double>::infinity();

  r.epsilon = std::min(r.basic, r.advanced);
  r.vacuous = r.epsilon > kVacuousEpsilon;
  return r;
}

absl::StatusOr<double> CalibrateNoiseMultiplier(double target, std::size_t lot,
                                                std::size_t n, std::size_t steps,
                                                double delta) {
  if (!(target > 0) || std::isinf(target)) {
    return absl::InvalidArgumentError("target epsilon must be finite and > 0");
  }
  auto eps = [&](double sigma) -> absl::StatusOr<double> {
    auto r = SimpleAccountant(sigma, lot, n, steps, delta);
    if (!r.ok()) return r.status();
    return r->epsilon;
  };
  double lo = 1e-3, hi = 1e4;
  auto at_hi = eps(hi);
  if (!at_hi.ok()) return at_hi.status();
  if (*at_hi > target) {
    return absl::OutOfRangeError(absl::StrCat("epsilon ", target,
                                              " needs sigma above ", hi));
  }
  auto at_lo = eps(lo);
  if (!at_lo.ok()) return at_lo.status();
  if (*at_lo <= target) return lo;
  // epsilon is decreasing in sigma; bisect in log space.
  while (hi / lo > 1 + 1e-6) {
    const double mid = std::sqrt(lo * hi);
    if (*eps(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

absl::StatusOr<DpTrainResult> TrainDpSgd(classifier::ClassifierModel& model,
                                         const data::LabeledDataset& data,
                                         const DpSgdConfig& config) {
  if (absl::Status s = ValidateDpSgdConfig(config); !s.ok()) return s;
  classifier::ClassifierConfig& train = model.mutable_config();
  train.batch_size = config.lot_size;
  train.steps = config.steps;
  train.learning_rate = config.learning_rate;

  DpSgdAggregator aggregator(config.clip_norm, config.noise_multiplier);
  auto trained = classifier::TrainClassifier(model, data, &aggregator);
  if (!trained.ok()) return trained.status();
  DpTrainResult result;
  result.train = std::move(*trained);
  for (std::string& w : DpSgdWarnings(config, data.size())) {
    result.train.warnings.push_back(std::move(w));
  }
  result.max_clipped_norm = aggregator.max_clipped_norm();
  const std::size_t lot = std::min(config.lot_size, data.size());
  if (config.noise_multiplier > 0) {
    auto privacy = SimpleAccountant(config.noise_multiplier, lot, data.size(),
                                    config.steps, config.delta);
    if (!privacy.ok()) return privacy.status();
    result.privacy = *privacy;
  } else {
    result.privacy = {std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity(), true};
  }
  return result;
}

}  // namespace cadp::dpsgd
