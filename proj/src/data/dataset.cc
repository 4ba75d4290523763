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

#include "cadp/data/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "cadp/base/rng.h"

namespace cadp::data {

using numerics::Matrix;

absl::Status LabeledDataset::Validate() const {
  if (features.rows() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset has ", features.rows(), " feature rows but ",
                     labels.size(), " labels"));
  }
  if (!features.empty() && features.cols() != schema.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset has ", features.cols(), " columns but schema ",
                     "lists ", schema.size(), " features"));
  }
  if (normalization.size() != schema.size()) {
    return absl::InvalidArgumentError("normalization record / schema mismatch");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      return absl::InvalidArgumentError(absl::StrCat(
          "label ", labels[i], " at row ", i, " outside [0, ", num_classes,
          ")"));
    }
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (schema[c].kind != FeatureKind::kBinary) continue;
    for (std::size_t r = 0; r < features.rows(); ++r) {
      const double v = features(r, c);
      if (v != 0.0 && v != 1.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("binary feature '", schema[c].name, "' has value ", v,
                         " at row ", r));
      }
    }
  }
  return absl::OkStatus();
}

bool SameSchema(const LabeledDataset& a, const LabeledDataset& b) {
  return a.schema == b.schema;
}

std::optional<std::size_t> FeatureIndex(const LabeledDataset& data,
                                        const std::string& name) {
  for (std::size_t i = 0; i < data.schema.size(); ++i) {
    if (data.schema[i].name == name) return i;
  }
  return std::nullopt;
}

Matrix Denormalize(const LabeledDataset& data) {
  Matrix raw = data.features;
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      const FeatureNormalization& n = data.normalization[c];
      if (n.kind != NormalizationKind::kNone) {
        raw(r, c) = raw(r, c) * n.scale + n.offset;
      }
    }
  }
  return raw;
}

absl::StatusOr<LabeledDataset> Standardize(
    LabeledDataset data, const std::vector<FeatureNormalization>* reference) {
  if (reference != nullptr && reference->size() != data.dim()) {
    return absl::InvalidArgumentError(
        "reference normalization does not match the schema width");
  }
  if (data.empty() && reference == nullptr) {
    return absl::InvalidArgumentError("cannot standardize an empty dataset");
  }
  const std::size_t n = data.size();
  for (std::size_t c = 0; c < data.dim(); ++c) {
    if (data.schema[c].kind == FeatureKind::kBinary) {
      data.normalization[c] = {};
      continue;
    }
    FeatureNormalization norm;
    if (reference != nullptr) {
      norm = (*reference)[c];
    } else {
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += data.features(r, c);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = data.features(r, c) - mean;
        var += d * d;
      }
      var /= static_cast<double>(n);
      const double sd = std::sqrt(var);
      norm = {NormalizationKind::kStandard, mean, sd > 0.0 ? sd : 1.0};
    }
    for (std::size_t r = 0; r < n; ++r) {
      data.features(r, c) = (data.features(r, c) - norm.offset) / norm.scale;
    }
    data.normalization[c] = norm;
  }
  return data;
}

LabeledDataset SelectRows(const LabeledDataset& data,
                          const std::vector<std::size_t>& indices) {
  LabeledDataset out;
  out.features = data.features.SelectRows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(data.labels.at(i));
  out.schema = data.schema;
  out.normalization = data.normalization;
  out.num_classes = data.num_classes;
  out.image_shape = data.image_shape;
  return out;
}

std::pair<LabeledDataset, LabeledDataset> SplitDataset(
    const LabeledDataset& data, std::size_t first_count, uint64_t seed) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));
  first_count = std::min(first_count, order.size());
  std::vector<std::size_t> first(order.begin(), order.begin() + first_count);
  std::vector<std::size_t> second(order.begin() + first_count, order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {SelectRows(data, first), SelectRows(data, second)};
}

namespace {

absl::StatusOr<std::optional<std::size_t>> ConditionColumn(
    const LabeledDataset& data, const ConditionSpec& spec) {
  if (spec.source == ConditionSource::kLabelOneHot) {
    return std::optional<std::size_t>();
  }
  const auto index = FeatureIndex(data, spec.feature);
  if (!index.has_value()) {
    return absl::NotFoundError(
        absl::StrCat("condition feature '", spec.feature, "' not in schema"));
  }
  if (data.schema[*index].kind != FeatureKind::kBinary) {
    return absl::InvalidArgumentError(
        absl::StrCat("condition feature '", spec.feature, "' is not binary"));
  }
  return index;
}

}  // namespace

absl::StatusOr<std::size_t> ConditionDim(const LabeledDataset& data,
                                         const ConditionSpec& spec) {
  auto column = ConditionColumn(data, spec);
  if (!column.ok()) return column.status();
  if (column->has_value()) return 2;
  if (data.num_classes < 1) {
    return absl::InvalidArgumentError("dataset declares no classes");
  }
  return static_cast<std::size_t>(data.num_classes);
}

absl::StatusOr<FlowInputs> MakeFlowInputs(const LabeledDataset& data,
                                          const ConditionSpec& spec) {
  auto column = ConditionColumn(data, spec);
  if (!column.ok()) return column.status();
  auto cond_dim = ConditionDim(data, spec);
  if (!cond_dim.ok()) return cond_dim.status();

  FlowInputs out;
  out.condition_feature = *column;
  const std::size_t n = data.size();
  const std::size_t flow_dim = data.dim() - (column->has_value() ? 1 : 0);
  out.x = Matrix(n, flow_dim);
  out.conditions = Matrix(n, *cond_dim);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t k = 0;
    for (std::size_t c = 0; c < data.dim(); ++c) {
      if (column->has_value() && **column == c) continue;
      out.x(r, k++) = data.features(r, c);
    }
    const int hot = column->has_value()
                        ? static_cast<int>(data.features(r, **column))
                        : data.labels[r];
    if (hot < 0 || static_cast<std::size_t>(hot) >= *cond_dim) {
      return absl::InvalidArgumentError(
          absl::StrCat("condition value ", hot, " at row ", r,
                       " outside [0, ", *cond_dim, ")"));
    }
    out.conditions(r, static_cast<std::size_t>(hot)) = 1.0;
  }
  return out;
}

absl::StatusOr<LabeledDataset> WithFlowFeatures(
    const LabeledDataset& original, const ConditionSpec& spec,
    const Matrix& flow_features) {
  auto column = ConditionColumn(original, spec);
  if (!column.ok()) return column.status();
  const std::size_t flow_dim =
      original.dim() - (column->has_value() ? 1 : 0);
  if (flow_features.rows() != original.size() ||
      flow_features.cols() != flow_dim) {
    return absl::InvalidArgumentError("flow feature matrix has wrong shape");
  }
  LabeledDataset out = original;
  for (std::size_t r = 0; r < original.size(); ++r) {
    std::size_t k = 0;
    for (std::size_t c = 0; c < original.dim(); ++c) {
      if (column->has_value() && **column == c) continue;
      out.features(r, c) = flow_features(r, k++);
    }
  }
  return out;
}

}  // namespace cadp::data
