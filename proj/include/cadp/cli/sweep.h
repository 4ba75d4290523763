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

#ifndef CADP_CLI_SWEEP_H_
#define CADP_CLI_SWEEP_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/cli/config.h"
#include "cadp/cli/report.h"

namespace cadp::cli {

struct SweepFailure {
  std::optional<double> epsilon;
  std::string method;
  uint64_t seed = 0;
  int exit_code = 0;
  std::string message;
};

struct DistortionRow {
  double epsilon = 0.0;
  uint64_t seed = 0;
  double mean_l2 = 0.0;
};

struct SweepResult {
  // Grid order: per seed, the original baseline, then per epsilon the CADP
  // and DP-SGD cells.
  std::vector<ReportRow> rows;
  std::vector<SweepFailure> failures;
  std::vector<DistortionRow> distortion;
};

struct SweepOptions {
  // Receives report.csv, failures.csv (when any), distortion.csv and one
  // flow checkpoint per seed. Empty: nothing is written.
  std::string out_dir;
  bool run_original = true;
  bool run_cadp = true;
  bool run_dpsgd = true;
};

// Seed of the CADP noise for (training seed, epsilon).
uint64_t PrivatizeSeed(uint64_t seed, double epsilon);

// Runs the grid. The flow of a seed is trained on the training split only,
// and the CADP classifiers see only its privatized copy; every classifier is
// tested on the original test split. Cell failures are collected, not
// returned; the status is non-OK only when no cell could run (bad config,
// unreadable data).
absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const SweepOptions& options, std::ostream& log);

// RunSweep plus the summary table on `out`. Fails (with the first failed
// cell's exit code) iff any cell failed.
absl::Status CmdSweep(const ExperimentConfig& config, const SweepOptions& options,
                      std::ostream& out);

// Mean test accuracy per (method, epsilon) over seeds, as a text table.
std::string SummaryTable(const std::vector<ReportRow>& rows);

}  // namespace cadp::cli

#endif  // CADP_CLI_SWEEP_H_
