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

#ifndef CADP_DATA_DATASET_H_
#define CADP_DATA_DATASET_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/numerics/matrix.h"

namespace cadp::data {

enum class FeatureKind { kContinuous, kBinary };

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;

  friend bool operator==(const Feature&, const Feature&) = default;
};

enum class NormalizationKind { kNone, kStandard, kMinMax };

// stored = (raw - offset) / scale.
struct FeatureNormalization {
  NormalizationKind kind = NormalizationKind::kNone;
  double offset = 0.0;
  double scale = 1.0;

  friend bool operator==(const FeatureNormalization&,
                         const FeatureNormalization&) = default;
};

// Samples with integer class labels. Features are held in normalized space;
// `normalization` maps them back to raw units exactly.
struct LabeledDataset {
  numerics::Matrix features;
  std::vector<int> labels;
  std::vector<Feature> schema;
  std::vector<FeatureNormalization> normalization;
  int num_classes = 0;
  // Set for image data (IDX); rows * cols == dim.
  std::optional<std::pair<std::size_t, std::size_t>> image_shape;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return schema.size(); }
  bool empty() const { return labels.empty(); }

  // Row count, label range, schema width, binary values.
  absl::Status Validate() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) =
      default;
};

// Feature names and kinds agree.
bool SameSchema(const LabeledDataset& a, const LabeledDataset& b);

std::optional<std::size_t> FeatureIndex(const LabeledDataset& data,
                                        const std::string& name);

// Feature values in raw units.
numerics::Matrix Denormalize(const LabeledDataset& data);

// Standardizes continuous features to zero mean / unit variance using this
// dataset's statistics (or `reference` normalization when given, e.g. to
// apply training statistics to a test split). Binary features are untouched.
// Expects `data` in raw units.
absl::StatusOr<LabeledDataset> Standardize(
    LabeledDataset data,
    const std::vector<FeatureNormalization>* reference = nullptr);

// Subset of rows, preserving schema and normalization.
LabeledDataset SelectRows(const LabeledDataset& data,
                          const std::vector<std::size_t>& indices);

// Seeded split into (first, second) with `first_count` rows in the first.
std::pair<LabeledDataset, LabeledDataset> SplitDataset(
    const LabeledDataset& data, std::size_t first_count, uint64_t seed);

enum class ConditionSource { kLabelOneHot, kBinaryFeature };

// How the flow's condition vector c(y) is built.
struct ConditionSpec {
  ConditionSource source = ConditionSource::kLabelOneHot;
  // For kBinaryFeature: the feature to condition on. It is removed from the
  // flow input and carried through privatization unchanged.
  std::string feature;
};

// What the flow sees: features (minus any conditioning column) and one-hot
// conditions.
struct FlowInputs {
  numerics::Matrix x;
  numerics::Matrix conditions;
  std::optional<std::size_t> condition_feature;
};

// One-hot width of the condition vector (>= 1).
absl::StatusOr<std::size_t> ConditionDim(const LabeledDataset& data,
                                         const ConditionSpec& spec);

absl::StatusOr<FlowInputs> MakeFlowInputs(const LabeledDataset& data,
                                          const ConditionSpec& spec);

// Inverse of MakeFlowInputs: a copy of `original` whose non-conditioning
// features are replaced by `flow_features` (same row order).
absl::StatusOr<LabeledDataset> WithFlowFeatures(
    const LabeledDataset& original, const ConditionSpec& spec,
    const numerics::Matrix& flow_features);

}  // namespace cadp::data

#endif  // CADP_DATA_DATASET_H_
