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

#include "cadp/cli/report.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "cadp/base/status_macros.h"

namespace cadp::cli {
namespace {

std::string Optional(const std::optional<double>& v) {
  return v ? FormatNumber(*v) : std::string();
}

absl::StatusOr<std::optional<double>> ParseOptional(absl::string_view s) {
  if (s.empty()) return std::optional<double>();
  double v;
  if (!absl::SimpleAtod(s, &v)) return absl::DataLossError(absl::StrCat("bad number '", s, "'"));
  return std::optional<double>(v);
}

absl::StatusOr<double> ParseRequired(absl::string_view s) {
  double v;
  if (!absl::SimpleAtod(s, &v)) return absl::DataLossError(absl::StrCat("bad number '", s, "'"));
  return v;
}

}  // namespace

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string FormatReportRow(const ReportRow& r) {
  return absl::StrCat(Optional(r.epsilon), ",", Optional(r.sensitivity), ",", r.method, ",",
                      r.seed, ",", FormatNumber(r.train_acc), ",", FormatNumber(r.test_acc), ",",
                      Optional(r.flow_nll), ",", FormatNumber(r.wallclock_s));
}

absl::StatusOr<ReportRow> ParseReportRow(const std::string& line) {
  std::vector<std::string> f = absl::StrSplit(absl::StripTrailingAsciiWhitespace(line), ',');
  if (f.size() != 8) {
    return absl::DataLossError(absl::StrCat("report row has ", f.size(), " fields, want 8"));
  }
  ReportRow r;
  CADP_ASSIGN_OR_RETURN(r.epsilon, ParseOptional(f[0]));
  CADP_ASSIGN_OR_RETURN(r.sensitivity, ParseOptional(f[1]));
  r.method = f[2];
  if (!absl::SimpleAtoi(f[3], &r.seed)) return absl::DataLossError("bad seed " + f[3]);
  CADP_ASSIGN_OR_RETURN(r.train_acc, ParseRequired(f[4]));
  CADP_ASSIGN_OR_RETURN(r.test_acc, ParseRequired(f[5]));
  CADP_ASSIGN_OR_RETURN(r.flow_nll, ParseOptional(f[6]));
  CADP_ASSIGN_OR_RETURN(r.wallclock_s, ParseRequired(f[7]));
  return r;
}

absl::Status WriteTextFile(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::NotFoundError("cannot write " + path);
    out << text;
    if (!out.flush()) return absl::DataLossError("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) return absl::DataLossError(absl::StrCat("rename to ", path, ": ", ec.message()));
  return absl::OkStatus();
}

absl::Status WriteReport(const std::string& path, const std::vector<ReportRow>& rows) {
  std::string text = absl::StrCat(kReportHeader, "\n");
  for (const ReportRow& r : rows) absl::StrAppend(&text, FormatReportRow(r), "\n");
  return WriteTextFile(path, text);
}

absl::Status AppendReportRow(const std::string& path, const ReportRow& row) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) return absl::NotFoundError("cannot open report " + path);
  if (fresh) out << kReportHeader << "\n";
  out << FormatReportRow(row) << "\n";
  if (!out.flush()) return absl::DataLossError("write failed: " + path);
  return absl::OkStatus();
}

absl::StatusOr<std::vector<ReportRow>> ReadReport(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot read report " + path);
  std::string line;
  if (!std::getline(in, line) || absl::StripTrailingAsciiWhitespace(line) != kReportHeader) {
    return absl::DataLossError(path + ": missing report header");
  }
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CADP_ASSIGN_OR_RETURN(ReportRow r, ParseReportRow(line));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cadp::cli
