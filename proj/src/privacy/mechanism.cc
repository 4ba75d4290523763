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

#include "cadp/privacy/mechanism.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "cadp/base/status_macros.h"

namespace cadp::privacy {

using numerics::Matrix;

const char* ClipModeName(ClipMode mode) {
  return mode == ClipMode::kRescaleAlways ? "rescale_always" : "clip_only";
}

absl::StatusOr<ClipMode> ParseClipMode(const std::string& name) {
  if (name == "rescale_always" || name == "RESCALE_ALWAYS") {
    return ClipMode::kRescaleAlways;
  }
  if (name == "clip_only" || name == "CLIP_ONLY") return ClipMode::kClipOnly;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown clip mode '", name, "' (rescale_always, clip_only)"));
}

absl::Status PrivacyParams::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat("epsilon must be > 0, got ", epsilon));
  }
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be > 0, got ", sensitivity));
  }
  return absl::OkStatus();
}

absl::StatusOr<SensitivityRule> ParseSensitivityRule(const std::string& name) {
  if (name == "fixed") return SensitivityRule::kFixed;
  if (name == "half_epsilon") return SensitivityRule::kHalfEpsilon;
  if (name == "half_epsilon_capped") return SensitivityRule::kHalfEpsilonCapped;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown sensitivity rule '", name,
      "' (fixed, half_epsilon, half_epsilon_capped)"));
}

const char* SensitivityRuleName(SensitivityRule rule) {
  switch (rule) {
    case SensitivityRule::kFixed:
      return "fixed";
    case SensitivityRule::kHalfEpsilon:
      return "half_epsilon";
    case SensitivityRule::kHalfEpsilonCapped:
      return "half_epsilon_capped";
  }
  return "fixed";
}

double ApplySensitivityRule(SensitivityRule rule, double epsilon, double fixed) {
  switch (rule) {
    case SensitivityRule::kFixed:
      return fixed;
    case SensitivityRule::kHalfEpsilon:
      return epsilon / 2.0;
    case SensitivityRule::kHalfEpsilonCapped:
      return std::min(epsilon / 2.0, 4.0);
  }
  return fixed;
}

absl::Status ClipL1(std::span<double> z, double s, ClipMode mode) {
  if (!(s > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat("clip target must be > 0, got ", s));
  }
  double norm = 0.0;
  for (double v : z) norm += std::abs(v);
  if (norm == 0.0) {
    if (mode == ClipMode::kClipOnly) return absl::OkStatus();
    return absl::InvalidArgumentError("cannot rescale a zero latent to L1 norm s");
  }
  if (mode == ClipMode::kClipOnly && norm <= s) return absl::OkStatus();
  const double factor = s / norm;
  for (double& v : z) v *= factor;
  return absl::OkStatus();
}

absl::Status PrivatizeLatent(std::span<double> z, const PrivacyParams& params,
                             LaplaceSampler* sampler) {
  CADP_RETURN_IF_ERROR(ClipL1(z, params.sensitivity, params.clip_mode));
  if (sampler != nullptr) {
    for (double& v : z) v += sampler->Sample();
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivatizeOutput> CadpPrivatize(const flow::FlowModel& model,
                                              const Matrix& x, const Matrix& c,
                                              const PrivacyParams& params,
                                              uint64_t seed, bool add_noise) {
  CADP_RETURN_IF_ERROR(params.Validate());
  if (x.cols() != model.dim() || c.cols() != model.cond_dim() || x.rows() != c.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "privatize: model expects dim ", model.dim(), " / cond ", model.cond_dim(),
        ", got [", x.rows(), " x ", x.cols(), "] / [", c.rows(), " x ", c.cols(), "]"));
  }
  PrivatizeOutput out;
  if (!model.volume_preserving()) {
    out.warnings.push_back(
        "model has non volume-preserving blocks; the epsilon guarantee assumes "
        "a constant |det J| and does not strictly apply");
    if (params.strict_accounting) {
      out.warnings.push_back(
          "strict accounting requested for a non volume-preserving model; the "
          "reported bound is not covered by the proof");
    }
  }
  try {
    Matrix z = model.Encode(x, c);
    std::vector<std::size_t> failed;
    std::string first_error;
    for (std::size_t r = 0; r < z.rows(); ++r) {
      LaplaceSampler sampler(params.noise_scale(), Rng::ForStream(seed, r));
      const absl::Status s =
          PrivatizeLatent(z.row(r), params, add_noise ? &sampler : nullptr);
      if (!s.ok()) {
        if (failed.empty()) first_error = std::string(s.message());
        failed.push_back(r);
      }
    }
    if (!failed.empty()) {
      constexpr std::size_t kListed = 20;
      std::vector<std::size_t> shown(failed.begin(),
                                     failed.begin() + std::min(kListed, failed.size()));
      return absl::FailedPreconditionError(absl::StrCat(
          failed.size(), " sample(s) cannot be privatized (", first_error,
          "); offending indices: ", absl::StrJoin(shown, ", "),
          failed.size() > kListed ? ", ..." : ""));
    }
    out.x = model.Inverse(z, c);
  } catch (const numerics::NumericalError& e) {
    return absl::FailedPreconditionError(absl::StrCat("privatize: ", e.what()));
  }
  return out;
}

absl::StatusOr<PrivateDataset> PrivatizeDataset(
    const flow::FlowModel& model, const data::LabeledDataset& data,
    const data::ConditionSpec& condition, const PrivacyParams& params,
    uint64_t seed) {
  if (data.empty()) return absl::InvalidArgumentError("privatize: empty dataset");
  CADP_ASSIGN_OR_RETURN(data::FlowInputs inputs, data::MakeFlowInputs(data, condition));
  CADP_ASSIGN_OR_RETURN(
      PrivatizeOutput out,
      CadpPrivatize(model, inputs.x, inputs.conditions, params, seed));
  CADP_ASSIGN_OR_RETURN(data::LabeledDataset result,
                        data::WithFlowFeatures(data, condition, out.x));
  return PrivateDataset{std::move(result), std::move(out.warnings)};
}

double LaplaceMechanism(double x, double sensitivity, double epsilon, Rng& rng) {
  return x + LaplaceInverseCdf(rng.UniformOpen(), sensitivity / epsilon);
}

absl::StatusOr<DpRatioResult> EmpiricalDpRatio(
    const std::function<double(double, Rng&)>& mechanism, double x,
    double x_prime, std::size_t trials, std::size_t bins, uint64_t seed,
    std::size_t min_count) {
  if (trials < 1000 || bins < 2) {
    return absl::InvalidArgumentError("dp ratio needs trials >= 1000 and bins >= 2");
  }
  Rng rng_a = Rng::ForStream(seed, 0);
  Rng rng_b = Rng::ForStream(seed, 1);
  std::vector<double> a(trials), b(trials);
  for (double& v : a) v = mechanism(x, rng_a);
  for (double& v : b) v = mechanism(x_prime, rng_b);

  std::vector<double> pooled;
  pooled.reserve(2 * trials);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  // Interior edges at pooled quantiles; duplicates collapse.
  std::vector<double> edges;
  for (std::size_t k = 1; k < bins; ++k) {
    const double e = pooled[k * pooled.size() / bins];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  const std::size_t used_bins = edges.size() + 1;
  auto histogram = [&](const std::vector<double>& samples) {
    std::vector<std::size_t> h(used_bins, 0);
    for (double v : samples) {
      h[std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()]++;
    }
    return h;
  };
  const auto ha = histogram(a), hb = histogram(b);
  DpRatioResult result;
  for (std::size_t k = 0; k < used_bins; ++k) {
    if (ha[k] < min_count || hb[k] < min_count) continue;
    ++result.bins_used;
    result.max_log_ratio = std::max(
        result.max_log_ratio,
        std::abs(std::log(static_cast<double>(ha[k]) / static_cast<double>(hb[k]))));
  }
  return result;
}

}  // namespace cadp::privacy
