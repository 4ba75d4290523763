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

#ifndef CADP_DATA_IDX_H_
#define CADP_DATA_IDX_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cadp/data/dataset.h"

namespace cadp::data {

inline constexpr uint32_t kIdxImageMagic = 0x00000803;
inline constexpr uint32_t kIdxLabelMagic = 0x00000801;

struct IdxImages {
  uint32_t count = 0;
  uint32_t rows = 0;
  uint32_t cols = 0;
  std::vector<uint8_t> pixels;  // count * rows * cols
};

// Big-endian IDX parsing; errors name the offending byte offset.
absl::StatusOr<IdxImages> ParseIdxImages(const std::vector<uint8_t>& bytes);
absl::StatusOr<std::vector<uint8_t>> ParseIdxLabels(
    const std::vector<uint8_t>& bytes);

std::vector<uint8_t> EncodeIdxImages(const IdxImages& images);
std::vector<uint8_t> EncodeIdxLabels(const std::vector<uint8_t>& labels);

// Loads an image/label file pair. Pixels are scaled to [0, 1] (min-max
// normalization record 0..255) and flattened to rows * cols features.
absl::StatusOr<LabeledDataset> LoadIdx(const std::string& images_path,
                                       const std::string& labels_path);

absl::StatusOr<std::vector<uint8_t>> ReadFileBytes(const std::string& path);

}  // namespace cadp::data

#endif  // CADP_DATA_IDX_H_
