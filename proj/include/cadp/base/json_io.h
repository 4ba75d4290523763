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

#ifndef CADP_BASE_JSON_IO_H_
#define CADP_BASE_JSON_IO_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/numerics/tensor.h"
#include "nlohmann/json.hpp"

namespace cadp {

// {"shape": [...], "values": [...]} per tensor. Doubles are written in
// shortest round-trip form, so reading restores them bitwise.
nlohmann::json TensorsToJson(const std::vector<numerics::Tensor>& tensors);
absl::StatusOr<std::vector<numerics::Tensor>> TensorsFromJson(
    const nlohmann::json& array);

// Writes via a temporary file and rename, so readers never see a partial
// document.
absl::Status WriteJsonFile(const std::string& path, const nlohmann::json& doc);
absl::StatusOr<nlohmann::json> ReadJsonFile(const std::string& path);

}  // namespace cadp

#endif  // CADP_BASE_JSON_IO_H_
