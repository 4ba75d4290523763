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

#ifndef CADP_DATA_PREPROCESS_H_
#define CADP_DATA_PREPROCESS_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"

namespace cadp::data {

// Adds N(0, sigma^2) noise (in normalized units) to every continuous feature.
// Binary features are untouched. Sample i draws from its own stream, so the
// result does not depend on row order of other samples.
absl::StatusOr<LabeledDataset> Dequantize(LabeledDataset data, double sigma,
                                          uint64_t seed);

}  // namespace cadp::data

#endif  // CADP_DATA_PREPROCESS_H_
