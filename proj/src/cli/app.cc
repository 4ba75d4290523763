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

#include "cadp/cli/app.h"

#include <algorithm>
#include <optional>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "cadp/base/status_macros.h"
#include "cadp/cli/commands.h"
#include "cadp/cli/config.h"
#include "cadp/cli/exit_codes.h"
#include "cadp/cli/sweep.h"

namespace cadp::cli {
namespace {

// Options every subcommand takes: where the experiment config comes from.
struct ConfigSource {
  std::string file;
  std::string preset;
  std::vector<std::string> overrides;
  bool print = false;

  void Register(CLI::App* app) {
    app->add_option("--config", file, "Experiment config file (INI)");
    app->add_option("--preset", preset, "Built-in preset: mnist, diabetes or toy");
    app->add_option("--set", overrides, "Override a config key: section.key=value")
        ->take_all();
    app->add_flag("--print-config", print, "Print the resolved config and exit");
  }

  absl::StatusOr<ExperimentConfig> Resolve() const {
    ExperimentConfig config;
    if (!file.empty() && !preset.empty()) {
      return absl::InvalidArgumentError(
          "give --config or --preset, not both (a file can start from a preset with "
          "[experiment] preset = NAME)");
    }
    if (!file.empty()) {
      auto loaded = LoadExperimentConfig(file);
      if (!loaded.ok()) return loaded.status();
      config = *std::move(loaded);
    } else if (!preset.empty()) {
      auto loaded = PresetConfig(preset);
      if (!loaded.ok()) return loaded.status();
      config = *std::move(loaded);
    }
    for (const std::string& o : overrides) CADP_RETURN_IF_ERROR(ApplyOverride(config, o));
    return config;
  }
};

int Report(const absl::Status& status, std::ostream& err) {
  if (status.ok()) return 0;
  const int code = ExitCodeOf(status);
  err << "error: " << status.message() << "\n";
  return code;
}

}  // namespace

int RunCli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Content-aware differential privacy with conditional invertible flows",
               "cadp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::optional<uint64_t> seed;
  std::string data, output, model, curve, report;

  // train-flow
  ConfigSource flow_src;
  CLI::App* train_flow = app.add_subcommand("train-flow", "Fit a conditional flow by MLE");
  flow_src.Register(train_flow);
  train_flow->add_option("--data", data, "Training data (default: data.train)");
  train_flow->add_option("--out", output, "Checkpoint path");
  train_flow->add_option("--curve", curve, "NLL curve CSV (default: <out>.nll.csv)");
  train_flow->add_option("--seed", seed, "Seed (default: first config seed)");

  // privatize
  ConfigSource priv_src;
  double epsilon = 0.0;
  std::optional<double> sensitivity;
  std::string rule, clip_mode;
  bool strict = false, no_noise = false;
  CLI::App* privatize = app.add_subcommand("privatize", "Privatize a dataset through a flow");
  priv_src.Register(privatize);
  privatize->add_option("--model", model, "Flow checkpoint")->required();
  privatize->add_option("--data", data, "Data to privatize (default: data.train)");
  privatize->add_option("--out", output, "Output (IDX directory or .csv)");
  privatize->add_option("--epsilon", epsilon, "Privacy budget (> 0)")->required();
  privatize->add_option("--sensitivity", sensitivity, "Fixed sensitivity s");
  privatize->add_option("--sensitivity-rule", rule,
                        "fixed, half_epsilon or half_epsilon_capped");
  privatize->add_option("--clip-mode", clip_mode, "rescale_always or clip_only");
  privatize->add_flag("--strict", strict, "Report the conservative 2*epsilon");
  privatize->add_flag("--no-noise", no_noise, "Debug: clip only, no Laplace noise");
  privatize->add_option("--seed", seed, "Noise seed (default: first config seed)");

  // train-classifier
  ConfigSource cls_src;
  std::vector<double> dp_args;
  CLI::App* train_cls = app.add_subcommand("train-classifier", "Train the FC classifier");
  cls_src.Register(train_cls);
  train_cls->add_option("--data", data, "Training data (default: data.train)");
  train_cls->add_option("--out", output, "Checkpoint path");
  train_cls->add_option("--curve", curve, "Loss curve CSV (default: <out>.curve.csv)");
  train_cls->add_option("--dpsgd", dp_args, "Train with DP-SGD: SIGMA CLIP DELTA")
      ->expected(3);
  train_cls->add_option("--seed", seed, "Seed (default: first config seed)");

  // eval
  ConfigSource eval_src;
  CLI::App* eval = app.add_subcommand("eval", "Test a classifier on original data");
  eval_src.Register(eval);
  eval->add_option("--model", model, "Classifier checkpoint")->required();
  eval->add_option("--data", data, "Test data (default: data.test)");
  eval->add_option("--report", report, "Report CSV to append a row to");

  // sweep
  ConfigSource sweep_src;
  bool wallclock = false;
  CLI::App* sweep = app.add_subcommand("sweep", "Run the epsilon x method x seed grid");
  sweep_src.Register(sweep);
  sweep->add_option("--out", output, "Output directory");
  sweep->add_flag("--wallclock", wallclock, "Record real timings (reports stop reproducing)");

  // diagnose
  ConfigSource diag_src;
  DiagnoseOptions diag;
  std::string mode;
  CLI::App* diagnose = app.add_subcommand("diagnose", "Invertibility, latent normality, DP ratio");
  diag_src.Register(diagnose);
  diagnose->add_option("mode", mode, "invertibility, latent-normality or dp-ratio")->required();
  diagnose->add_option("--model", model, "Flow checkpoint");
  diagnose->add_option("--data", data, "Data (default: data.test)");
  diagnose->add_option("--samples", diag.samples, "Rows to use (0: all)");
  diagnose->add_option("--max-error", diag.max_error, "Round-trip error threshold");
  diagnose->add_option("--epsilon", diag.epsilon, "dp-ratio: epsilon");
  diagnose->add_option("--sensitivity", diag.sensitivity, "dp-ratio: sensitivity");
  diagnose->add_option("--trials", diag.trials, "dp-ratio: trials per input");
  diagnose->add_option("--bins", diag.bins, "dp-ratio: histogram bins");
  diagnose->add_option("--tolerance", diag.tolerance, "dp-ratio: allowed excess over epsilon");
  diagnose->add_option("--seed", seed, "Seed");

  std::vector<std::string> args(args_in.rbegin(), args_in.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // Subcommand help arrives here too.
    if (e.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help()
                                            : app.get_subcommands().front()->help());
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfig);
  }

  CLI::App* cmd = app.get_subcommands().front();
  ConfigSource* src = cmd == train_flow ? &flow_src
                      : cmd == privatize ? &priv_src
                      : cmd == train_cls ? &cls_src
                      : cmd == eval      ? &eval_src
                      : cmd == sweep     ? &sweep_src
                                         : &diag_src;
  if (!rule.empty()) src->overrides.push_back("privacy.sensitivity_rule=" + rule);
  if (!clip_mode.empty()) src->overrides.push_back("privacy.clip_mode=" + clip_mode);
  if (strict) src->overrides.push_back("privacy.strict_accounting=true");
  if (wallclock) src->overrides.push_back("experiment.record_wallclock=true");
  auto config = src->Resolve();
  if (!config.ok()) {
    return Report(WithExitCode(config.status(), ExitCode::kConfig), err);
  }
  if (src->print) {
    out << RenderConfig(*config);
    return 0;
  }
  const uint64_t run_seed = seed ? *seed : config->seeds.empty() ? 0 : config->seeds.front();

  if (cmd == train_flow) {
    return Report(CmdTrainFlow({*config, data, output, curve, run_seed}, out), err);
  }
  if (cmd == privatize) {
    PrivatizeOptions o{*config, model, data, output, epsilon, sensitivity, no_noise, run_seed};
    return Report(CmdPrivatize(o, out), err);
  }
  if (cmd == train_cls) {
    TrainClassifierOptions o{*config, data, output, curve, std::nullopt, run_seed};
    if (!dp_args.empty()) o.dpsgd = DpSgdArgs{dp_args[0], dp_args[1], dp_args[2]};
    return Report(CmdTrainClassifier(o, out), err);
  }
  if (cmd == eval) return Report(CmdEval({*config, model, data, report}, out), err);
  if (cmd == sweep) {
    if (output.empty()) {
      return Report(WithExitCode(absl::InvalidArgumentError("sweep needs --out"),
                                 ExitCode::kConfig),
                    err);
    }
    SweepOptions o;
    o.out_dir = output;
    return Report(CmdSweep(*config, o, out), err);
  }
  auto parsed_mode = ParseDiagnoseMode(mode);
  if (!parsed_mode.ok()) {
    return Report(WithExitCode(parsed_mode.status(), ExitCode::kConfig), err);
  }
  diag.config = *config;
  diag.mode = *parsed_mode;
  diag.model = model;
  diag.data = data;
  diag.seed = run_seed;
  return Report(CmdDiagnose(diag, out), err);
}

}  // namespace cadp::cli
