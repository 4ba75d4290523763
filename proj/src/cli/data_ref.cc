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

#include "cadp/cli/data_ref.h"

#include <filesystem>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/strip.h"
#include "cadp/base/status_macros.h"
#include "cadp/cli/exit_codes.h"
#include "cadp/data/csv.h"
#include "cadp/data/export.h"
#include "cadp/data/idx.h"
#include "cadp/data/synthetic.h"

namespace cadp::cli {
namespace {

namespace fs = std::filesystem;

constexpr char kImagesSuffix[] = "images-idx3-ubyte";
constexpr char kLabelsSuffix[] = "labels-idx1-ubyte";

absl::Status DataError(absl::Status status) {
  return WithExitCode(std::move(status), ExitCode::kData);
}

// Train and test come from one draw so they share the standardization.
absl::StatusOr<data::LabeledDataset> Synthetic(const std::string& kind_name,
                                               const DataConfig& config, Split split) {
  CADP_ASSIGN_OR_RETURN(data::SyntheticKind kind, data::ParseSyntheticKind(kind_name));
  const std::size_t n_train = config.synthetic_train;
  const std::size_t n_test = config.synthetic_test;
  if (n_train == 0 || (split == Split::kTest && n_test == 0)) {
    return absl::InvalidArgumentError("synthetic split size is zero");
  }
  CADP_ASSIGN_OR_RETURN(data::LabeledDataset all,
                        data::MakeSynthetic(kind, n_train + n_test, config.seed));
  std::vector<std::size_t> rows;
  const std::size_t begin = split == Split::kTrain ? 0 : n_train;
  const std::size_t end = split == Split::kTrain ? n_train : n_train + n_test;
  for (std::size_t i = begin; i < end; ++i) rows.push_back(i);
  return data::SelectRows(all, rows);
}

std::string StripSlash(std::string ref) {
  while (ref.size() > 1 && ref.back() == '/') ref.pop_back();
  return ref;
}

}  // namespace

const char* SplitName(Split split) { return split == Split::kTrain ? "train" : "test"; }

absl::StatusOr<LoadedData> LoadDataRef(const std::string& ref_in, const DataConfig& config,
                                       Split split, const data::LabeledDataset* reference) {
  auto expanded = ExpandVariables(ref_in);
  if (!expanded.ok()) return WithExitCode(expanded.status(), ExitCode::kConfig);
  const std::string ref = StripSlash(*expanded);
  if (ref.empty()) {
    return WithExitCode(absl::InvalidArgumentError("no data reference given"),
                        ExitCode::kConfig);
  }
  if (absl::StartsWith(ref, "synthetic:")) {
    auto d = Synthetic(ref.substr(10), config, split);
    if (!d.ok()) return WithExitCode(d.status(), ExitCode::kConfig);
    return LoadedData{*std::move(d), DataFormat::kSynthetic};
  }
  std::error_code ec;
  if (fs::is_directory(ref, ec)) {
    const std::string prefix = absl::StrCat(ref, "/", SplitName(split), "-");
    auto d = data::LoadIdx(prefix + kImagesSuffix, prefix + kLabelsSuffix);
    if (!d.ok()) return DataError(d.status());
    return LoadedData{*std::move(d), DataFormat::kIdx};
  }
  if (absl::StrContains(ref, kImagesSuffix)) {
    const std::string labels = absl::StrReplaceAll(ref, {{kImagesSuffix, kLabelsSuffix}});
    auto d = data::LoadIdx(ref, labels);
    if (!d.ok()) return DataError(d.status());
    return LoadedData{*std::move(d), DataFormat::kIdx};
  }
  if (absl::EndsWithIgnoreCase(ref, ".csv")) {
    if (!fs::exists(ref, ec)) return DataError(absl::NotFoundError("no such file: " + ref));
    if (fs::exists(data::CsvMetaPath(ref), ec)) {
      auto d = data::ReadExportedCsv(ref);
      if (!d.ok()) return DataError(d.status());
      return LoadedData{*std::move(d), DataFormat::kExportedCsv};
    }
    data::CsvSchemaSpec spec;
    spec.label_column = config.label_column;
    spec.binary_columns = config.binary_columns;
    spec.label_bins = static_cast<int>(config.label_bins);
    auto d = data::LoadCsv(ref, spec, reference);
    if (!d.ok()) return DataError(d.status());
    return LoadedData{*std::move(d), DataFormat::kCsv};
  }
  if (!fs::exists(ref, ec)) return DataError(absl::NotFoundError("no such file: " + ref));
  return DataError(absl::InvalidArgumentError(
      "unrecognized data reference '" + ref +
      "' (want synthetic:<kind>, an IDX directory or images file, or a .csv)"));
}

absl::StatusOr<LoadedData> LoadTestSplit(const std::string& ref, const DataConfig& config) {
  const bool raw_csv = absl::EndsWithIgnoreCase(ref, ".csv") &&
                       !fs::exists(data::CsvMetaPath(ref));
  if (raw_csv && absl::EndsWithIgnoreCase(config.train, ".csv") && config.train != ref) {
    CADP_ASSIGN_OR_RETURN(LoadedData train, LoadDataRef(config.train, config, Split::kTrain));
    return LoadDataRef(ref, config, Split::kTest, &train.data);
  }
  return LoadDataRef(ref, config, Split::kTest);
}

absl::Status WriteDataRef(const data::LabeledDataset& data, DataFormat format,
                          const std::string& out_in, Split split,
                          std::vector<std::string>* warnings) {
  const std::string out = StripSlash(out_in);
  if (format == DataFormat::kIdx) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) return DataError(absl::NotFoundError("cannot create " + out + ": " + ec.message()));
    const std::string prefix = absl::StrCat(out, "/", SplitName(split), "-");
    auto r = data::ExportIdx(data, prefix + kImagesSuffix, prefix + kLabelsSuffix);
    if (!r.ok()) return DataError(r.status());
    if (r->clamped > 0 && warnings != nullptr) {
      warnings->push_back(absl::StrCat(r->clamped,
                                       " values outside [0, 1] were clamped before "
                                       "requantization to bytes"));
    }
    return absl::OkStatus();
  }
  if (fs::path parent = fs::path(out).parent_path(); !parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  return DataError(data::ExportCsv(data, out));
}

std::string ManifestPath(const std::string& data_ref) {
  return StripSlash(data_ref) + ".manifest.json";
}

}  // namespace cadp::cli
