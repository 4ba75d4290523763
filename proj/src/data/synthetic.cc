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

#include "cadp/data/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "cadp/base/rng.h"

namespace cadp::data {
namespace {

using numerics::Matrix;

// Labels 0,1,0,1,... in a seeded random order.
std::vector<int> BalancedLabels(std::size_t n, Rng& rng) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 2);
  rng.Shuffle(std::span<int>(labels));
  return labels;
}

LabeledDataset Empty(std::size_t n, std::vector<Feature> schema) {
  LabeledDataset d;
  d.features = Matrix(n, schema.size());
  d.normalization.assign(schema.size(), {});
  d.schema = std::move(schema);
  d.num_classes = 2;
  return d;
}

LabeledDataset TwoGaussians(std::size_t n, Rng& rng) {
  LabeledDataset d = Empty(n, {{"x0"}, {"x1"}});
  d.labels = BalancedLabels(n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    d.features(i, 0) = (d.labels[i] == 0 ? -2.0 : 2.0) + rng.Normal();
    d.features(i, 1) = rng.Normal();
  }
  return d;
}

LabeledDataset TwoMoons(std::size_t n, Rng& rng) {
  LabeledDataset d = Empty(n, {{"x0"}, {"x1"}});
  d.labels = BalancedLabels(n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::numbers::pi * rng.Uniform();
    if (d.labels[i] == 0) {
      d.features(i, 0) = std::cos(t);
      d.features(i, 1) = std::sin(t);
    } else {
      d.features(i, 0) = 1.0 - std::cos(t);
      d.features(i, 1) = 0.5 - std::sin(t);
    }
    d.features(i, 0) += 0.1 * rng.Normal();
    d.features(i, 1) += 0.1 * rng.Normal();
  }
  return d;
}

double Clamp(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

// Loosely follows the scikit-learn diabetes table in raw units: age in whole
// years, sex coded 0/1, bp rounded to whole mmHg, s4 (cholesterol ratio) on a
// handful of levels, s5 log-scale. The label is high vs. low progression.
absl::StatusOr<LabeledDataset> CategoricalMixture(std::size_t n, Rng& rng) {
  LabeledDataset d = Empty(n, {{"age"},
                               {"sex", FeatureKind::kBinary},
                               {"bmi"},
                               {"bp"},
                               {"s1"},
                               {"s2"},
                               {"s3"},
                               {"s4"},
                               {"s5"},
                               {"s6"}});
  d.labels = BalancedLabels(n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = d.labels[i];
    const double sex = rng.Uniform() < 0.47 ? 1.0 : 0.0;
    // Shared "metabolic" factor couples bmi, bp, s5, s6.
    const double m = 0.8 * y + 0.3 * sex + rng.Normal();
    const double age = std::round(Clamp(44.0 + 6.0 * y + 12.0 * rng.Normal(), 19, 79));
    const double bmi = 24.5 + 2.2 * m + 2.0 * rng.Normal();
    const double bp = std::round(90.0 + 4.0 * sex + 8.0 * m + 8.0 * rng.Normal());
    const double s1 = 185.0 + 6.0 * y + 30.0 * rng.Normal();
    const double s2 = 0.6 * (s1 - 185.0) + 112.0 - 8.0 * sex + 18.0 * rng.Normal();
    const double s3 = 52.0 - 6.0 * m + 8.0 * sex + 10.0 * rng.Normal();
    const double s4 = std::round(Clamp(4.0 + 0.5 * m - 0.5 * sex + 1.0 * rng.Normal(), 2, 8));
    const double s5 = 4.6 + 0.25 * m + 0.3 * rng.Normal();
    const double s6 = std::round(91.0 + 5.0 * m + 8.0 * rng.Normal());
    const double row[] = {age, sex, bmi, bp, s1, s2, s3, s4, s5, s6};
    for (std::size_t c = 0; c < 10; ++c) d.features(i, c) = row[c];
  }
  return Standardize(std::move(d));
}

}  // namespace

absl::StatusOr<SyntheticKind> ParseSyntheticKind(const std::string& name) {
  if (name == "two-gaussians") return SyntheticKind::kTwoGaussians;
  if (name == "two-moons") return SyntheticKind::kTwoMoons;
  if (name == "categorical-mixture") return SyntheticKind::kCategoricalMixture;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown synthetic kind '", name,
                   "' (two-gaussians, two-moons, categorical-mixture)"));
}

std::string SyntheticKindName(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kTwoGaussians:
      return "two-gaussians";
    case SyntheticKind::kTwoMoons:
      return "two-moons";
    case SyntheticKind::kCategoricalMixture:
      return "categorical-mixture";
  }
  return "?";
}

absl::StatusOr<LabeledDataset> MakeSynthetic(SyntheticKind kind, std::size_t n,
                                             uint64_t seed) {
  if (n < 10) {
    return absl::InvalidArgumentError(
        absl::StrCat("synthetic datasets need n >= 10, got ", n));
  }
  Rng rng(seed);
  switch (kind) {
    case SyntheticKind::kTwoGaussians:
      return TwoGaussians(n, rng);
    case SyntheticKind::kTwoMoons:
      return TwoMoons(n, rng);
    case SyntheticKind::kCategoricalMixture:
      return CategoricalMixture(n, rng);
  }
  return absl::InvalidArgumentError("unknown synthetic kind");
}

}  // namespace cadp::data
