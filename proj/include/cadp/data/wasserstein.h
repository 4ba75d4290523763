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

#ifndef CADP_DATA_WASSERSTEIN_H_
#define CADP_DATA_WASSERSTEIN_H_

#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"

namespace cadp::data {

// Exact Wasserstein-1 distance between two empirical 1D distributions
// (integral of |F_a - F_b|). Sample sizes may differ. Both must be non-empty.
double Wasserstein1(std::span<const double> a, std::span<const double> b);

// W1 between the raw-unit marginals of `feature` in two datasets with the
// same schema.
absl::StatusOr<double> MarginalDistance(const LabeledDataset& a,
                                        const LabeledDataset& b,
                                        const std::string& feature);

}  // namespace cadp::data

#endif  // CADP_DATA_WASSERSTEIN_H_
