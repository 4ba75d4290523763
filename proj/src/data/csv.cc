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

#include "cadp/data/csv.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "cadp/base/status_macros.h"

namespace cadp::data {
namespace {

bool ParseDouble(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end != begin + cell.size() || errno == ERANGE || !std::isfinite(v)) {
    return false;
  }
  *out = v;
  return true;
}

}  // namespace

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started) {
          return absl::InvalidArgumentError(
              absl::StrCat("csv line ", line, ": stray quote in field"));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) {
    return absl::InvalidArgumentError(
        absl::StrCat("csv line ", line, ": unterminated quoted field"));
  }
  if (field_started || !row.empty()) end_row();
  return rows;
}

absl::StatusOr<LabeledDataset> LoadCsvFromString(
    const std::string& text, const CsvSchemaSpec& spec,
    const LabeledDataset* reference) {
  CADP_ASSIGN_OR_RETURN(auto rows, ParseCsv(text));
  if (rows.empty()) return absl::InvalidArgumentError("csv: missing header");
  const std::vector<std::string>& header = rows[0];
  const auto label_it =
      std::find(header.begin(), header.end(), spec.label_column);
  if (label_it == header.end()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "csv: label column '", spec.label_column, "' not in header"));
  }
  const std::size_t label_col = label_it - header.begin();

  LabeledDataset out;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col) continue;
    feature_cols.push_back(c);
    const bool binary = std::find(spec.binary_columns.begin(),
                                  spec.binary_columns.end(),
                                  header[c]) != spec.binary_columns.end();
    out.schema.push_back(
        {header[c], binary ? FeatureKind::kBinary : FeatureKind::kContinuous});
  }
  for (const std::string& name : spec.binary_columns) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("csv: unknown binary column '", name, "'"));
    }
  }
  if (!spec.expected_features.empty()) {
    std::vector<std::string> names;
    for (const Feature& f : out.schema) names.push_back(f.name);
    if (names.size() != spec.expected_features.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("csv: header has ", names.size(),
                       " feature columns, schema expects ",
                       spec.expected_features.size()));
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != spec.expected_features[i]) {
        return absl::InvalidArgumentError(
            absl::StrCat("csv: column ", i + 1, " is '", names[i],
                         "', schema expects '", spec.expected_features[i], "'"));
      }
    }
  }
  if (reference != nullptr && !SameSchema(out, *reference)) {
    return absl::InvalidArgumentError("csv: schema differs from reference");
  }

  // Skip blank trailing lines.
  while (rows.size() > 1 && rows.back().size() == 1 && rows.back()[0].empty()) {
    rows.pop_back();
  }
  const std::size_t n = rows.size() - 1;
  const std::size_t dim = feature_cols.size();
  out.features = numerics::Matrix(n, dim);
  std::vector<double> raw_labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& cells = rows[r + 1];
    const std::size_t line = r + 2;
    if (cells.size() != header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("csv line ", line, ": ", cells.size(),
                       " cells, header has ", header.size()));
    }
    for (std::size_t k = 0; k < dim; ++k) {
      double v;
      if (!ParseDouble(cells[feature_cols[k]], &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("csv line ", line, " column ", feature_cols[k] + 1,
                         ": non-numeric value '", cells[feature_cols[k]], "'"));
      }
      if (out.schema[k].kind == FeatureKind::kBinary && v != 0.0 && v != 1.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("csv line ", line, " column ", feature_cols[k] + 1,
                         ": binary feature '", out.schema[k].name,
                         "' has value ", cells[feature_cols[k]]));
      }
      out.features(r, k) = v;
    }
    if (!ParseDouble(cells[label_col], &raw_labels[r])) {
      return absl::InvalidArgumentError(
          absl::StrCat("csv line ", line, " column ", label_col + 1,
                       ": non-numeric label '", cells[label_col], "'"));
    }
  }

  out.labels.resize(n);
  if (spec.label_bins > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return raw_labels[a] < raw_labels[b];
    });
    for (std::size_t rank = 0; rank < n; ++rank) {
      out.labels[order[rank]] =
          static_cast<int>(rank * spec.label_bins / std::max<std::size_t>(n, 1));
    }
    out.num_classes = spec.label_bins;
  } else {
    int max_label = -1;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = raw_labels[r];
      if (v < 0 || v != std::floor(v) || v > 1e6) {
        return absl::InvalidArgumentError(
            absl::StrCat("csv line ", r + 2, " column ", label_col + 1,
                         ": label must be a non-negative integer"));
      }
      out.labels[r] = static_cast<int>(v);
      max_label = std::max(max_label, out.labels[r]);
    }
    out.num_classes = max_label + 1;
  }
  if (reference != nullptr) {
    out.num_classes = std::max(out.num_classes, reference->num_classes);
  }
  out.normalization.assign(dim, {});
  if (spec.standardize) {
    return Standardize(std::move(out),
                       reference != nullptr ? &reference->normalization
                                            : nullptr);
  }
  return out;
}

absl::StatusOr<LabeledDataset> LoadCsv(const std::string& path,
                                       const CsvSchemaSpec& spec,
                                       const LabeledDataset* reference) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto loaded = LoadCsvFromString(buffer.str(), spec, reference);
  if (!loaded.ok()) {
    return absl::Status(loaded.status().code(),
                        absl::StrCat(path, ": ", loaded.status().message()));
  }
  return loaded;
}

}  // namespace cadp::data
