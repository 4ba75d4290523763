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

#include "cadp/base/json_io.h"

#include <cstdio>
#include <fstream>

#include "absl/strings/str_cat.h"

namespace cadp {

using nlohmann::json;

json TensorsToJson(const std::vector<numerics::Tensor>& tensors) {
  json out = json::array();
  for (const numerics::Tensor& t : tensors) {
    out.push_back({{"shape", t.shape()},
                   {"values", std::vector<double>(t.values().begin(), t.values().end())}});
  }
  return out;
}

absl::StatusOr<std::vector<numerics::Tensor>> TensorsFromJson(const json& array) {
  if (!array.is_array()) return absl::InvalidArgumentError("expected a tensor array");
  std::vector<numerics::Tensor> out;
  try {
    for (std::size_t i = 0; i < array.size(); ++i) {
      auto shape = array[i].at("shape").get<numerics::Shape>();
      auto values = array[i].at("values").get<std::vector<double>>();
      if (numerics::ShapeSize(shape) != values.size()) {
        return absl::InvalidArgumentError(
            absl::StrCat("tensor ", i, ": shape ", numerics::ShapeToString(shape),
                         " does not hold ", values.size(), " values"));
      }
      out.push_back(numerics::MakeTensor(std::move(shape), std::move(values), true));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("tensor array: ", e.what()));
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("tensor array: ", e.what()));
  }
  return out;
}

absl::Status WriteJsonFile(const std::string& path, const json& doc) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
    out << doc.dump(1) << "\n";
    if (!out) return absl::InternalError(absl::StrCat("write failed: ", tmp));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    return absl::InternalError(absl::StrCat("cannot move ", tmp, " to ", path));
  }
  return absl::OkStatus();
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", e.what()));
  }
}

}  // namespace cadp
