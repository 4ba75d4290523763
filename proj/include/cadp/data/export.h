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

#ifndef CADP_DATA_EXPORT_H_
#define CADP_DATA_EXPORT_H_

#include <cstddef>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"

namespace cadp::data {

// Writes `path` (stored feature values at 17 significant digits plus a
// trailing "label" column) and `path`.meta.json (schema kinds, normalization
// record, class count, image shape). ReadExportedCsv restores the dataset
// bitwise.
absl::Status ExportCsv(const LabeledDataset& data, const std::string& path);
absl::StatusOr<LabeledDataset> ReadExportedCsv(const std::string& path);

std::string CsvMetaPath(const std::string& csv_path);

struct IdxExportResult {
  // Values outside [0, 1] that were clamped before requantization.
  std::size_t clamped = 0;
};

// Requantizes stored values (expected in [0, 1]) to bytes and writes an
// images/labels IDX pair. Image shape defaults to 1 x dim.
absl::StatusOr<IdxExportResult> ExportIdx(const LabeledDataset& data,
                                          const std::string& images_path,
                                          const std::string& labels_path);

}  // namespace cadp::data

#endif  // CADP_DATA_EXPORT_H_
