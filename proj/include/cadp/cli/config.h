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

#ifndef CADP_CLI_CONFIG_H_
#define CADP_CLI_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/classifier/classifier.h"
#include "cadp/data/dataset.h"
#include "cadp/dpsgd/dpsgd.h"
#include "cadp/flow/flow.h"
#include "cadp/flow/train.h"
#include "cadp/privacy/mechanism.h"

namespace cadp::cli {

struct DataConfig {
  // Data references: "synthetic:<kind>", an IDX directory (train-/test-
  // file pairs), an IDX images file, or a .csv file.
  std::string train;
  std::string test;
  std::string label_column = "label";
  std::vector<std::string> binary_columns;
  std::size_t label_bins = 0;
  // "label" (one-hot class) or the name of a binary feature.
  std::string condition = "label";
  std::size_t synthetic_train = 1000;
  std::size_t synthetic_test = 1000;
  // Seed of synthetic data; fixed across training seeds.
  uint64_t seed = 0;
};

struct FlowPreset {
  flow::CouplingKind coupling = flow::CouplingKind::kGin;
  std::size_t blocks = 4;
  std::size_t width = 128;
  std::size_t hidden_layers = 2;
  numerics::Activation activation = numerics::Activation::kRelu;
  double clamp = 2.0;
  double input_noise = 0.0;
  double input_scale = 1.0;
  flow::FlowTrainConfig train;
};

struct PrivacyConfig {
  std::vector<double> epsilons = {0.2, 0.5, 1.0, 2.0, 10.0};
  privacy::SensitivityRule sensitivity_rule = privacy::SensitivityRule::kHalfEpsilonCapped;
  // Used by the fixed rule.
  double sensitivity = 1.0;
  privacy::ClipMode clip_mode = privacy::ClipMode::kRescaleAlways;
  bool strict_accounting = false;
};

struct DpSgdPreset {
  double clip_norm = 1.0;
  double delta = dpsgd::kDefaultDelta;
};

struct ExperimentConfig {
  std::string name = "default";
  DataConfig data;
  FlowPreset flow;
  PrivacyConfig privacy;
  classifier::ClassifierConfig classifier;
  DpSgdPreset dpsgd;
  std::vector<uint64_t> seeds = {0, 1, 2};
  // Real timings in report rows; off by default so reports reproduce bitwise.
  bool record_wallclock = false;
};

// Built-in presets: "mnist", "diabetes", "toy".
absl::StatusOr<ExperimentConfig> PresetConfig(const std::string& name);
std::vector<std::string> PresetNames();

// INI file. `[experiment] preset = NAME` starts from a preset; every other
// key overrides it. Relative paths resolve against the file's directory and
// ${VAR} expands from the environment. Unknown keys are errors.
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// "section.key=value", as in the file.
absl::Status ApplyOverride(ExperimentConfig& config, const std::string& assignment);

// Replaces ${VAR} with the environment variable; unset variables are an
// error.
absl::StatusOr<std::string> ExpandVariables(const std::string& value);

absl::Status ValidateExperimentConfig(const ExperimentConfig& config);

data::ConditionSpec ConditionFromConfig(const DataConfig& data);
flow::FlowConfig FlowConfigFor(const FlowPreset& preset, std::size_t dim,
                               std::size_t cond_dim, uint64_t seed);
double SensitivityFor(const PrivacyConfig& privacy, double epsilon);

// Canonical INI rendering (all keys), for provenance and --print-config.
std::string RenderConfig(const ExperimentConfig& config);

}  // namespace cadp::cli

#endif  // CADP_CLI_CONFIG_H_
