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

#ifndef CADP_FLOW_DIAGNOSTICS_H_
#define CADP_FLOW_DIAGNOSTICS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "cadp/flow/flow.h"

namespace cadp::flow {

// Pass criteria for "the latents look like N(0, I)". The skew and kurtosis
// bounds come from pilot runs of the toy presets.
struct NormalityThresholds {
  double max_abs_mean = 0.25;
  double min_variance = 0.6;
  double max_variance = 1.6;
  double max_abs_skew = 0.5;
  double max_abs_excess_kurtosis = 1.0;
};

struct LatentDiagnostics {
  std::size_t samples = 0;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> skewness;
  std::vector<double> excess_kurtosis;
  double max_abs_correlation = 0.0;
  bool passed = false;
  // Human-readable reasons for failure (empty when passed).
  std::vector<std::string> findings;

  double MaxAbsMean() const;
  double MinVariance() const;
  double MaxVariance() const;
  double MaxAbsSkew() const;
  double MaxAbsExcessKurtosis() const;
};

// Moment summary of latent samples z [n x d] (n >= 2).
LatentDiagnostics DiagnoseLatents(const Matrix& z,
                                  const NormalityThresholds& thresholds = {});

LatentDiagnostics DiagnoseModel(const FlowModel& model, const Matrix& x,
                                const Matrix& c,
                                const NormalityThresholds& thresholds = {});

}  // namespace cadp::flow

#endif  // CADP_FLOW_DIAGNOSTICS_H_
