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

#include "cadp/data/export.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "cadp/base/status_macros.h"
#include "cadp/data/csv.h"
#include "cadp/data/idx.h"
#include "nlohmann/json.hpp"

namespace cadp::data {
namespace {

using nlohmann::json;

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Quotes a header cell when RFC 4180 requires it.
std::string CsvCell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

absl::Status WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << contents;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

const char* NormName(NormalizationKind kind) {
  switch (kind) {
    case NormalizationKind::kNone:
      return "none";
    case NormalizationKind::kStandard:
      return "standard";
    case NormalizationKind::kMinMax:
      return "minmax";
  }
  return "none";
}

absl::StatusOr<NormalizationKind> ParseNorm(const std::string& s) {
  if (s == "none") return NormalizationKind::kNone;
  if (s == "standard") return NormalizationKind::kStandard;
  if (s == "minmax") return NormalizationKind::kMinMax;
  return absl::InvalidArgumentError(absl::StrCat("unknown normalization '", s, "'"));
}

absl::Status CheckExportable(const LabeledDataset& data) {
  if (data.empty()) return absl::InvalidArgumentError("refusing to export an empty dataset");
  return data.Validate();
}

}  // namespace

std::string CsvMetaPath(const std::string& csv_path) {
  return csv_path + ".meta.json";
}

absl::Status ExportCsv(const LabeledDataset& data, const std::string& path) {
  CADP_RETURN_IF_ERROR(CheckExportable(data));
  std::string text;
  for (const Feature& f : data.schema) {
    if (f.name == "label") {
      return absl::InvalidArgumentError("feature named 'label' clashes with the label column");
    }
    absl::StrAppend(&text, CsvCell(f.name), ",");
  }
  text += "label\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.dim(); ++c) {
      absl::StrAppend(&text, FormatDouble(data.features(r, c)), ",");
    }
    absl::StrAppend(&text, data.labels[r], "\n");
  }

  json meta;
  meta["format_version"] = 1;
  meta["num_classes"] = data.num_classes;
  json features = json::array();
  for (std::size_t c = 0; c < data.dim(); ++c) {
    const FeatureNormalization& n = data.normalization[c];
    features.push_back({{"name", data.schema[c].name},
                        {"kind", data.schema[c].kind == FeatureKind::kBinary
                                     ? "binary"
                                     : "continuous"},
                        {"normalization", NormName(n.kind)},
                        {"offset", n.offset},
                        {"scale", n.scale}});
  }
  meta["features"] = std::move(features);
  if (data.image_shape.has_value()) {
    meta["image_shape"] = {data.image_shape->first, data.image_shape->second};
  }
  CADP_RETURN_IF_ERROR(WriteFile(path, text));
  return WriteFile(CsvMetaPath(path), meta.dump(1) + "\n");
}

absl::StatusOr<LabeledDataset> ReadExportedCsv(const std::string& path) {
  std::ifstream in(CsvMetaPath(path));
  if (!in) {
    return absl::NotFoundError(absl::StrCat("missing metadata ", CsvMetaPath(path)));
  }
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(CsvMetaPath(path), ": ", e.what()));
  }
  try {
    CsvSchemaSpec spec;
    spec.standardize = false;
    for (const json& f : meta.at("features")) {
      spec.expected_features.push_back(f.at("name").get<std::string>());
      if (f.at("kind").get<std::string>() == "binary") {
        spec.binary_columns.push_back(spec.expected_features.back());
      }
    }
    CADP_ASSIGN_OR_RETURN(LabeledDataset data, LoadCsv(path, spec));
    const int declared = meta.at("num_classes").get<int>();
    if (declared < data.num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": labels exceed declared class count ", declared));
    }
    data.num_classes = declared;
    std::size_t c = 0;
    for (const json& f : meta.at("features")) {
      CADP_ASSIGN_OR_RETURN(data.normalization[c].kind,
                            ParseNorm(f.at("normalization").get<std::string>()));
      data.normalization[c].offset = f.at("offset").get<double>();
      data.normalization[c].scale = f.at("scale").get<double>();
      ++c;
    }
    if (meta.contains("image_shape")) {
      data.image_shape = {meta["image_shape"].at(0).get<std::size_t>(),
                          meta["image_shape"].at(1).get<std::size_t>()};
    }
    return data;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(CsvMetaPath(path), ": ", e.what()));
  }
}

absl::StatusOr<IdxExportResult> ExportIdx(const LabeledDataset& data,
                                          const std::string& images_path,
                                          const std::string& labels_path) {
  CADP_RETURN_IF_ERROR(CheckExportable(data));
  IdxImages images;
  images.count = static_cast<uint32_t>(data.size());
  if (data.image_shape.has_value()) {
    images.rows = static_cast<uint32_t>(data.image_shape->first);
    images.cols = static_cast<uint32_t>(data.image_shape->second);
  } else {
    images.rows = 1;
    images.cols = static_cast<uint32_t>(data.dim());
  }
  if (static_cast<std::size_t>(images.rows) * images.cols != data.dim()) {
    return absl::InvalidArgumentError("image shape does not match feature count");
  }
  IdxExportResult result;
  images.pixels.reserve(data.features.size());
  for (double v : data.features.values()) {
    if (v < 0.0 || v > 1.0) {
      ++result.clamped;
      v = std::clamp(v, 0.0, 1.0);
    }
    images.pixels.push_back(static_cast<uint8_t>(std::lround(v * 255.0)));
  }
  std::vector<uint8_t> labels;
  labels.reserve(data.size());
  for (int y : data.labels) {
    if (y > 255) return absl::InvalidArgumentError("IDX labels must fit in a byte");
    labels.push_back(static_cast<uint8_t>(y));
  }
  const std::vector<uint8_t> image_bytes = EncodeIdxImages(images);
  const std::vector<uint8_t> label_bytes = EncodeIdxLabels(labels);
  CADP_RETURN_IF_ERROR(WriteFile(
      images_path, std::string(image_bytes.begin(), image_bytes.end())));
  CADP_RETURN_IF_ERROR(WriteFile(
      labels_path, std::string(label_bytes.begin(), label_bytes.end())));
  return result;
}

}  // namespace cadp::data
