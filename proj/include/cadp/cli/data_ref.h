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

#ifndef CADP_CLI_DATA_REF_H_
#define CADP_CLI_DATA_REF_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/cli/config.h"
#include "cadp/data/dataset.h"

namespace cadp::cli {

enum class Split { kTrain, kTest };
const char* SplitName(Split split);

enum class DataFormat {
  kSynthetic,
  kIdx,
  // A CSV with a .meta.json sidecar (our own export): restored bitwise.
  kExportedCsv,
  kCsv,
};

struct LoadedData {
  data::LabeledDataset data;
  DataFormat format = DataFormat::kSynthetic;
};

// Resolves a data reference:
//   synthetic:<kind>        generated from config.seed (test split: a
//                           different stream)
//   <dir>                   <dir>/{train,test}-{images-idx3,labels-idx1}-ubyte
//   <...images...-ubyte>    IDX images file; labels file by name
//   <file>.csv              exported CSV when a sidecar exists, else parsed
//                           with the config's column settings
// A raw CSV test split is standardized with `reference`'s statistics.
// Failures carry exit code 3.
absl::StatusOr<LoadedData> LoadDataRef(const std::string& ref, const DataConfig& config,
                                       Split split,
                                       const data::LabeledDataset* reference = nullptr);

// The config's test split; a raw CSV test split borrows the train split's
// normalization.
absl::StatusOr<LoadedData> LoadTestSplit(const std::string& ref, const DataConfig& config);

// Writes `data` in `format`: IDX into directory `out` (as the `split`
// pair), anything else as an exported CSV at `out`. Requantization notes
// land in `warnings`.
absl::Status WriteDataRef(const data::LabeledDataset& data, DataFormat format,
                          const std::string& out, Split split,
                          std::vector<std::string>* warnings);

// Sidecar of a privatized dataset.
std::string ManifestPath(const std::string& data_ref);

}  // namespace cadp::cli

#endif  // CADP_CLI_DATA_REF_H_
