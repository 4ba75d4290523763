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

#include "cadp/data/wasserstein.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "absl/strings/str_cat.h"

namespace cadp::data {

double Wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("Wasserstein1 needs non-empty samples");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  // Sweep the merged support; between consecutive points both CDFs are flat.
  std::size_t i = 0, j = 0;
  double total = 0.0;
  double prev = std::min(sa[0], sb[0]);
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      x = sa[i];
    } else {
      x = sb[j];
    }
    total += std::abs(i / na - j / nb) * (x - prev);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    prev = x;
  }
  return total;
}

absl::StatusOr<double> MarginalDistance(const LabeledDataset& a,
                                        const LabeledDataset& b,
                                        const std::string& feature) {
  if (!SameSchema(a, b)) {
    return absl::InvalidArgumentError("marginal distance needs a shared schema");
  }
  const auto index = FeatureIndex(a, feature);
  if (!index.has_value()) {
    return absl::NotFoundError(absl::StrCat("feature '", feature, "' not in schema"));
  }
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("marginal distance of an empty dataset");
  }
  const numerics::Matrix ra = Denormalize(a);
  const numerics::Matrix rb = Denormalize(b);
  const std::vector<double> ca = ra.column(*index);
  const std::vector<double> cb = rb.column(*index);
  return Wasserstein1(ca, cb);
}

}  // namespace cadp::data
