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

#include "cadp/data/idx.h"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "absl/strings/str_cat.h"
#include "cadp/base/status_macros.h"

namespace cadp::data {
namespace {

uint32_t ReadBigEndian(const std::vector<uint8_t>& bytes, std::size_t offset) {
  return (static_cast<uint32_t>(bytes[offset]) << 24) |
         (static_cast<uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<uint32_t>(bytes[offset + 3]);
}

void AppendBigEndian(std::vector<uint8_t>& out, uint32_t value) {
  out.push_back(static_cast<uint8_t>(value >> 24));
  out.push_back(static_cast<uint8_t>(value >> 16));
  out.push_back(static_cast<uint8_t>(value >> 8));
  out.push_back(static_cast<uint8_t>(value));
}

absl::Status CheckHeader(const std::vector<uint8_t>& bytes, uint32_t magic,
                         std::size_t header_size, const char* what) {
  if (bytes.size() < header_size) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, ": header truncated at byte ", bytes.size(),
                     " (need ", header_size, ")"));
  }
  const uint32_t found = ReadBigEndian(bytes, 0);
  if (found != magic) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, ": bad magic 0x", absl::Hex(found, absl::kZeroPad8),
                     " at byte 0 (expected 0x",
                     absl::Hex(magic, absl::kZeroPad8), ")"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<IdxImages> ParseIdxImages(const std::vector<uint8_t>& bytes) {
  CADP_RETURN_IF_ERROR(CheckHeader(bytes, kIdxImageMagic, 16, "idx images"));
  IdxImages out;
  out.count = ReadBigEndian(bytes, 4);
  out.rows = ReadBigEndian(bytes, 8);
  out.cols = ReadBigEndian(bytes, 12);
  const uint64_t payload =
      static_cast<uint64_t>(out.count) * out.rows * out.cols;
  if (bytes.size() - 16 < payload) {
    const uint64_t per_image = static_cast<uint64_t>(out.rows) * out.cols;
    return absl::InvalidArgumentError(absl::StrCat(
        "idx images: header declares ", out.count, " images of ", out.rows,
        "x", out.cols, " but payload ends at byte ", bytes.size(), " (",
        per_image == 0 ? 0 : (bytes.size() - 16) / per_image,
        " complete images; expected ", 16 + payload, " bytes)"));
  }
  if (bytes.size() - 16 > payload) {
    return absl::InvalidArgumentError(
        absl::StrCat("idx images: ", bytes.size() - 16 - payload,
                     " trailing bytes after offset ", 16 + payload));
  }
  out.pixels.assign(bytes.begin() + 16, bytes.end());
  return out;
}

absl::StatusOr<std::vector<uint8_t>> ParseIdxLabels(
    const std::vector<uint8_t>& bytes) {
  CADP_RETURN_IF_ERROR(CheckHeader(bytes, kIdxLabelMagic, 8, "idx labels"));
  const uint32_t count = ReadBigEndian(bytes, 4);
  if (bytes.size() - 8 != count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "idx labels: header declares ", count, " labels but payload from byte ",
        "8 holds ", bytes.size() - 8));
  }
  return std::vector<uint8_t>(bytes.begin() + 8, bytes.end());
}

std::vector<uint8_t> EncodeIdxImages(const IdxImages& images) {
  std::vector<uint8_t> out;
  out.reserve(16 + images.pixels.size());
  AppendBigEndian(out, kIdxImageMagic);
  AppendBigEndian(out, images.count);
  AppendBigEndian(out, images.rows);
  AppendBigEndian(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<uint8_t> EncodeIdxLabels(const std::vector<uint8_t>& labels) {
  std::vector<uint8_t> out;
  out.reserve(8 + labels.size());
  AppendBigEndian(out, kIdxLabelMagic);
  AppendBigEndian(out, static_cast<uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

absl::StatusOr<std::vector<uint8_t>> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

absl::StatusOr<LabeledDataset> LoadIdx(const std::string& images_path,
                                       const std::string& labels_path) {
  CADP_ASSIGN_OR_RETURN(const std::vector<uint8_t> image_bytes,
                        ReadFileBytes(images_path));
  CADP_ASSIGN_OR_RETURN(const std::vector<uint8_t> label_bytes,
                        ReadFileBytes(labels_path));
  auto images = ParseIdxImages(image_bytes);
  if (!images.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(images_path, ": ", images.status().message()));
  }
  auto labels = ParseIdxLabels(label_bytes);
  if (!labels.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(labels_path, ": ", labels.status().message()));
  }
  if (labels->size() != images->count) {
    return absl::InvalidArgumentError(
        absl::StrCat("idx count mismatch: ", images->count, " images vs ",
                     labels->size(), " labels"));
  }
  const std::size_t dim = static_cast<std::size_t>(images->rows) * images->cols;
  LabeledDataset out;
  out.features = numerics::Matrix(images->count, dim);
  auto& values = out.features.mutable_values();
  for (std::size_t i = 0; i < images->pixels.size(); ++i) {
    values[i] = images->pixels[i] / 255.0;
  }
  out.labels.assign(labels->begin(), labels->end());
  out.num_classes =
      labels->empty() ? 0 : *std::max_element(labels->begin(), labels->end()) + 1;
  out.schema.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.schema.push_back({absl::StrCat("px", i), FeatureKind::kContinuous});
  }
  out.normalization.assign(dim, {NormalizationKind::kMinMax, 0.0, 255.0});
  out.image_shape = {{images->rows, images->cols}};
  return out;
}

}  // namespace cadp::data
