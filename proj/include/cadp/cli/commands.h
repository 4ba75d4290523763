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

#ifndef CADP_CLI_COMMANDS_H_
#define CADP_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/cli/config.h"
#include "cadp/cli/exit_codes.h"
#include "cadp/flow/flow.h"
#include "cadp/privacy/mechanism.h"

namespace cadp::cli {

// Every command returns a status whose exit code (ExitCodeOf) is the
// process exit code. Human-readable progress goes to `out`.

struct TrainFlowOptions {
  ExperimentConfig config;
  std::string data;  // empty: config.data.train
  std::string out;
  std::string curve;  // empty: <out>.nll.csv
  uint64_t seed = 0;
};
absl::Status CmdTrainFlow(const TrainFlowOptions& options, std::ostream& out);

struct PrivatizeOptions {
  ExperimentConfig config;
  std::string model;
  std::string data;  // empty: config.data.train
  std::string out;
  double epsilon = 0.0;
  // Fixed sensitivity; otherwise the config's rule.
  std::optional<double> sensitivity;
  // Debug: clip only, no Laplace noise.
  bool no_noise = false;
  uint64_t seed = 0;
};
absl::Status CmdPrivatize(const PrivatizeOptions& options, std::ostream& out);

struct DpSgdArgs {
  double noise_multiplier = 1.0;
  double clip_norm = 1.0;
  double delta = 1e-5;
};

struct TrainClassifierOptions {
  ExperimentConfig config;
  std::string data;  // empty: config.data.train
  std::string out;
  std::string curve;  // empty: <out>.curve.csv
  std::optional<DpSgdArgs> dpsgd;
  uint64_t seed = 0;
};
absl::Status CmdTrainClassifier(const TrainClassifierOptions& options, std::ostream& out);

struct EvalOptions {
  ExperimentConfig config;
  std::string model;
  std::string data;    // empty: config.data.test
  std::string report;  // empty: no row appended
};
absl::Status CmdEval(const EvalOptions& options, std::ostream& out);

enum class DiagnoseMode { kInvertibility, kLatentNormality, kDpRatio };
absl::StatusOr<DiagnoseMode> ParseDiagnoseMode(const std::string& name);

struct DiagnoseOptions {
  ExperimentConfig config;
  DiagnoseMode mode = DiagnoseMode::kInvertibility;
  // invertibility / latent-normality
  std::string model;
  std::string data;  // empty: config.data.test
  std::size_t samples = 100;
  double max_error = 1e-6;
  // dp-ratio: Laplace mechanism on the scalars 0 and `sensitivity`.
  double epsilon = 1.0;
  double sensitivity = 1.0;
  std::size_t trials = 1000000;
  std::size_t bins = 100;
  double tolerance = 0.1;
  uint64_t seed = 0;
};
// Prints raw numbers and PASS/FAIL; a FAIL returns exit code 7.
absl::Status CmdDiagnose(const DiagnoseOptions& options, std::ostream& out);

// Max over rows of |f^-1(f(x, c), c) - x|_inf.
double MaxRoundTripError(const flow::FlowModel& model, const numerics::Matrix& x,
                         const numerics::Matrix& c);

// Mean over rows of |a_i - b_i|_2, in stored units.
double MeanL2Distortion(const numerics::Matrix& a, const numerics::Matrix& b);

// FNV-1a 64 of a file's bytes, as 16 hex digits.
absl::StatusOr<std::string> FileHash(const std::string& path);

}  // namespace cadp::cli

#endif  // CADP_CLI_COMMANDS_H_
