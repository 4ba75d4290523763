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

#include "cadp/data/preprocess.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "cadp/base/rng.h"

namespace cadp::data {

absl::StatusOr<LabeledDataset> Dequantize(LabeledDataset data, double sigma,
                                          uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("dequantization sigma must be >= 0, got ", sigma));
  }
  if (sigma == 0.0) return data;
  for (std::size_t r = 0; r < data.size(); ++r) {
    Rng rng = Rng::ForStream(seed, r);
    for (std::size_t c = 0; c < data.dim(); ++c) {
      if (data.schema[c].kind == FeatureKind::kBinary) continue;
      data.features(r, c) += sigma * rng.Normal();
    }
  }
  return data;
}

}  // namespace cadp::data
