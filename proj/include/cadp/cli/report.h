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

#ifndef CADP_CLI_REPORT_H_
#define CADP_CLI_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace cadp::cli {

inline constexpr char kReportHeader[] =
    "epsilon,sensitivity,method,seed,train_acc,test_acc_on_original,flow_nll,"
    "wallclock_s";

// One (epsilon, method, seed) result. Fields that do not apply to a method
// (epsilon of the original baseline, flow_nll of DP-SGD) are written empty.
struct ReportRow {
  std::optional<double> epsilon;
  std::optional<double> sensitivity;
  std::string method;  // original | cadp | dpsgd
  uint64_t seed = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  std::optional<double> flow_nll;
  double wallclock_s = 0.0;
};

// Shortest text that parses back to the same double.
std::string FormatNumber(double value);

std::string FormatReportRow(const ReportRow& row);
absl::StatusOr<ReportRow> ParseReportRow(const std::string& line);

// Header plus rows, written atomically.
absl::Status WriteReport(const std::string& path, const std::vector<ReportRow>& rows);
// Appends a row, writing the header first if the file is new or empty.
absl::Status AppendReportRow(const std::string& path, const ReportRow& row);
absl::StatusOr<std::vector<ReportRow>> ReadReport(const std::string& path);

// Writes `text` via a temporary file and rename.
absl::Status WriteTextFile(const std::string& path, const std::string& text);

}  // namespace cadp::cli

#endif  // CADP_CLI_REPORT_H_
