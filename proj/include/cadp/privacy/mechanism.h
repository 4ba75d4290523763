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

#ifndef CADP_PRIVACY_MECHANISM_H_
#define CADP_PRIVACY_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"
#include "cadp/flow/flow.h"
#include "cadp/privacy/laplace.h"

namespace cadp::privacy {

enum class ClipMode {
  // z <- s z / |z|_1 for every z.
  kRescaleAlways,
  // Rescale only when |z|_1 > s.
  kClipOnly,
};

const char* ClipModeName(ClipMode mode);
absl::StatusOr<ClipMode> ParseClipMode(const std::string& name);

struct PrivacyParams {
  double epsilon = 1.0;
  double sensitivity = 1.0;
  ClipMode clip_mode = ClipMode::kRescaleAlways;
  // Report 2 * epsilon: clipped latents of two inputs can be 2s apart in L1.
  bool strict_accounting = false;

  absl::Status Validate() const;
  double noise_scale() const { return sensitivity / epsilon; }
  double reported_epsilon() const {
    return strict_accounting ? 2.0 * epsilon : epsilon;
  }
};

enum class SensitivityRule {
  kFixed,              // as given
  kHalfEpsilon,        // s = eps / 2
  kHalfEpsilonCapped,  // s = min(eps / 2, 4)
};

absl::StatusOr<SensitivityRule> ParseSensitivityRule(const std::string& name);
const char* SensitivityRuleName(SensitivityRule rule);
double ApplySensitivityRule(SensitivityRule rule, double epsilon, double fixed);

// L1 clipping of one latent. RESCALE_ALWAYS rejects a zero vector.
absl::Status ClipL1(std::span<double> z, double s, ClipMode mode);

// clip(z) + Lap(s/eps) noise in place; `sampler` null means no noise.
absl::Status PrivatizeLatent(std::span<double> z, const PrivacyParams& params,
                             LaplaceSampler* sampler);

struct PrivatizeOutput {
  numerics::Matrix x;
  // Stated-assumption notes (e.g. a non volume-preserving model).
  std::vector<std::string> warnings;
};

// x~ = f^-1(clip(f(x, c)) + Lap(s/eps)^d, c). Row i draws its noise from
// stream (seed, i), so rows are independent and results do not depend on
// batch composition. Any failing row fails the whole call with
// kFailedPrecondition, listing the offending rows.
absl::StatusOr<PrivatizeOutput> CadpPrivatize(const flow::FlowModel& model,
                                              const numerics::Matrix& x,
                                              const numerics::Matrix& c,
                                              const PrivacyParams& params,
                                              uint64_t seed,
                                              bool add_noise = true);

struct PrivateDataset {
  data::LabeledDataset data;
  std::vector<std::string> warnings;
};

// The mechanism over a whole dataset: labels, schema and the conditioning
// column are carried through unchanged.
absl::StatusOr<PrivateDataset> PrivatizeDataset(
    const flow::FlowModel& model, const data::LabeledDataset& data,
    const data::ConditionSpec& condition, const PrivacyParams& params,
    uint64_t seed);

// Scalar Laplace mechanism x + Lap(s / eps).
double LaplaceMechanism(double x, double sensitivity, double epsilon, Rng& rng);

struct DpRatioResult {
  double max_log_ratio = 0.0;
  std::size_t bins_used = 0;
};

// Runs `mechanism` `trials` times on x and on x', histograms both outputs on
// shared equal-mass bins (quantiles of the pooled outputs), and returns the
// largest |log(p_x / p_x')| over bins with at least `min_count` hits in both.
absl::StatusOr<DpRatioResult> EmpiricalDpRatio(
    const std::function<double(double, Rng&)>& mechanism, double x,
    double x_prime, std::size_t trials, std::size_t bins, uint64_t seed,
    std::size_t min_count = 50);

}  // namespace cadp::privacy

#endif  // CADP_PRIVACY_MECHANISM_H_
