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

#ifndef CADP_DATA_SYNTHETIC_H_
#define CADP_DATA_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"

namespace cadp::data {

enum class SyntheticKind {
  // Two isotropic unit-variance Gaussians centred at (-2, 0) and (2, 0).
  kTwoGaussians,
  // Two interleaved half circles with N(0, 0.1^2) jitter.
  kTwoMoons,
  // Ten diabetes-like features (age, sex, bmi, bp, s1..s6) drawn from a
  // mixture over (label, sex) cells; "sex" is binary and several columns
  // take few discrete levels. Continuous features are standardized.
  kCategoricalMixture,
};

// Differential entropy of one two-gaussians class: log(2 pi e).
inline constexpr double kTwoGaussiansClassEntropy = 2.8378770664093453;

absl::StatusOr<SyntheticKind> ParseSyntheticKind(const std::string& name);
std::string SyntheticKindName(SyntheticKind kind);

// Balanced (class sizes differ by at most one), deterministic per seed.
absl::StatusOr<LabeledDataset> MakeSynthetic(SyntheticKind kind, std::size_t n,
                                             uint64_t seed);

}  // namespace cadp::data

#endif  // CADP_DATA_SYNTHETIC_H_
