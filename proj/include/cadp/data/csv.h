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

#ifndef CADP_DATA_CSV_H_
#define CADP_DATA_CSV_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"

namespace cadp::data {

// Parses RFC 4180 text (quoted fields, doubled quotes, CRLF or LF).
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    const std::string& text);

struct CsvSchemaSpec {
  std::string label_column = "label";
  // Columns validated as {0, 1} and never normalized.
  std::vector<std::string> binary_columns;
  // When non-empty the header must list exactly these feature columns (in
  // order, label column excluded).
  std::vector<std::string> expected_features;
  bool standardize = true;
  // > 0: a continuous label column is binned into this many equal-count
  // classes by its sorted values. 0: labels must be non-negative integers.
  int label_bins = 0;
};

// Loads a header-first CSV. Continuous features are standardized with this
// file's statistics, or with `reference`'s record when given (test splits).
// Errors carry 1-based line and column positions.
absl::StatusOr<LabeledDataset> LoadCsv(const std::string& path,
                                       const CsvSchemaSpec& spec,
                                       const LabeledDataset* reference = nullptr);

absl::StatusOr<LabeledDataset> LoadCsvFromString(
    const std::string& text, const CsvSchemaSpec& spec,
    const LabeledDataset* reference = nullptr);

}  // namespace cadp::data

#endif  // CADP_DATA_CSV_H_
