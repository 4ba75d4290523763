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

#include "cadp/cli/sweep.h"

#include <bit>
#include <chrono>
#include <filesystem>
#include <map>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"
#include "cadp/base/rng.h"
#include "cadp/base/status_macros.h"
#include "cadp/cli/commands.h"
#include "cadp/cli/data_ref.h"
#include "cadp/cli/exit_codes.h"
#include "cadp/cli/pipeline.h"

namespace cadp::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

ReportRow Row(std::optional<double> eps, std::optional<double> s, const char* method,
              uint64_t seed) {
  ReportRow r;
  r.epsilon = eps;
  r.sensitivity = s;
  r.method = method;
  r.seed = seed;
  return r;
}

std::string CsvField(std::string s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  return absl::StrCat("\"", absl::StrReplaceAll(s, {{"\"", "\"\""}}), "\"");
}

absl::Status WriteOutputs(const std::string& dir, const SweepResult& r) {
  CADP_RETURN_IF_ERROR(WriteReport(dir + "/report.csv", r.rows));
  const std::string failures = dir + "/failures.csv";
  if (r.failures.empty()) {
    std::error_code ec;
    fs::remove(failures, ec);
  } else {
    std::string text = "epsilon,method,seed,exit_code,message\n";
    for (const SweepFailure& f : r.failures) {
      absl::StrAppend(&text, f.epsilon ? FormatNumber(*f.epsilon) : "", ",", f.method, ",",
                      f.seed, ",", f.exit_code, ",", CsvField(f.message), "\n");
    }
    CADP_RETURN_IF_ERROR(WriteTextFile(failures, text));
  }
  if (!r.distortion.empty()) {
    std::string text = "epsilon,seed,mean_l2\n";
    for (const DistortionRow& d : r.distortion) {
      absl::StrAppend(&text, FormatNumber(d.epsilon), ",", d.seed, ",",
                      FormatNumber(d.mean_l2), "\n");
    }
    CADP_RETURN_IF_ERROR(WriteTextFile(dir + "/distortion.csv", text));
  }
  return absl::OkStatus();
}

}  // namespace

uint64_t PrivatizeSeed(uint64_t seed, double epsilon) {
  return MixSeed(seed ^ MixSeed(std::bit_cast<uint64_t>(epsilon)));
}

absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const SweepOptions& options, std::ostream& log) {
  CADP_RETURN_IF_ERROR(WithExitCode(ValidateExperimentConfig(config), ExitCode::kConfig));
  CADP_ASSIGN_OR_RETURN(LoadedData train,
                        LoadDataRef(config.data.train, config.data, Split::kTrain));
  CADP_ASSIGN_OR_RETURN(LoadedData test, LoadTestSplit(config.data.test, config.data));
  if (!options.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec) {
      return WithExitCode(absl::NotFoundError("cannot create " + options.out_dir),
                          ExitCode::kData);
    }
  }
  const data::ConditionSpec condition = ConditionFromConfig(config.data);
  const std::size_t n = train.data.size();

  SweepResult result;
  auto fail = [&](std::optional<double> eps, const std::string& method, uint64_t seed,
                  const absl::Status& s) {
    result.failures.push_back({eps, method, seed, ExitCodeOf(s), std::string(s.message())});
    log << absl::StrFormat("[seed %d] %s%s FAILED (exit %d): %s\n", seed, method,
                           eps ? " eps=" + FormatNumber(*eps) : "", ExitCodeOf(s),
                           s.message());
  };
  auto seconds = [&](Clock::time_point t0) {
    return config.record_wallclock
               ? std::chrono::duration<double>(Clock::now() - t0).count()
               : 0.0;
  };
  // Trains, tests on the original test split, and fills the accuracies.
  auto fit = [&](const data::LabeledDataset& d, uint64_t seed,
                 const std::optional<dpsgd::DpSgdConfig>& dp,
                 ReportRow& row) -> absl::Status {
    CADP_ASSIGN_OR_RETURN(TrainedClassifier c,
                          TrainClassifierOn(config.classifier, d, seed, dp));
    CADP_ASSIGN_OR_RETURN(row.test_acc, classifier::Evaluate(c.model, test.data));
    row.train_acc = c.metadata.provenance.train_acc;
    return absl::OkStatus();
  };

  for (uint64_t seed : config.seeds) {
    if (options.run_original) {
      const auto t0 = Clock::now();
      ReportRow row = Row(std::nullopt, std::nullopt, "original", seed);
      if (absl::Status s = fit(train.data, seed, std::nullopt, row); s.ok()) {
        row.wallclock_s = seconds(t0);
        log << absl::StrFormat("[seed %d] original: test %.4f (train %.4f)\n", seed,
                               row.test_acc, row.train_acc);
        result.rows.push_back(row);
      } else {
        fail(std::nullopt, "original", seed, s);
      }
    }

    std::optional<TrainedFlow> flow;
    absl::Status flow_status = absl::OkStatus();
    double flow_seconds = 0.0;
    if (options.run_cadp) {
      const auto t0 = Clock::now();
      auto trained = TrainFlowOn(config, train.data, seed);
      flow_seconds = seconds(t0);
      if (trained.ok()) {
        flow.emplace(*std::move(trained));
        log << absl::StrFormat("[seed %d] flow: held-out NLL %.4f at step %d\n", seed,
                               flow->result.best_heldout_nll, flow->result.best_step);
        if (!options.out_dir.empty()) {
          const std::string path = absl::StrCat(options.out_dir, "/flow_seed", seed, ".json");
          if (absl::Status s = flow::SaveFlowCheckpoint(path, flow->model, flow->metadata);
              !s.ok()) {
            log << "warning: " << s.message() << "\n";
          }
        }
      } else {
        flow_status = trained.status();
      }
    }

    for (double eps : config.privacy.epsilons) {
      if (options.run_cadp) {
        const double s = SensitivityFor(config.privacy, eps);
        if (!flow) {
          fail(eps, "cadp", seed,
               absl::Status(flow_status.code(),
                            absl::StrCat("flow training failed: ", flow_status.message())));
        } else {
          const auto t0 = Clock::now();
          auto priv = PrivatizeWith(flow->model, condition, config.privacy, train.data,
                                    {eps, s, PrivatizeSeed(seed, eps), true});
          ReportRow row = Row(eps, s, "cadp", seed);
          row.flow_nll = flow->result.best_heldout_nll;
          absl::Status st = priv.status();
          if (st.ok()) {
            result.distortion.push_back(
                {eps, seed, MeanL2Distortion(priv->data.features, train.data.features)});
            st = fit(priv->data, seed, std::nullopt, row);
          }
          if (st.ok()) {
            row.wallclock_s = config.record_wallclock ? flow_seconds + seconds(t0) : 0.0;
            log << absl::StrFormat("[seed %d] cadp eps=%s s=%s: test %.4f (train %.4f)\n",
                                   seed, FormatNumber(eps), FormatNumber(s), row.test_acc,
                                   row.train_acc);
            result.rows.push_back(row);
          } else {
            fail(eps, "cadp", seed, st);
          }
        }
      }
      if (options.run_dpsgd) {
        const auto t0 = Clock::now();
        ReportRow row = Row(eps, std::nullopt, "dpsgd", seed);
        dpsgd::DpSgdConfig dp = DpSgdConfigFor(config, n, 1.0);
        auto sigma = dpsgd::CalibrateNoiseMultiplier(eps, dp.lot_size, n, dp.steps, dp.delta);
        absl::Status st = sigma.status();
        if (st.ok()) {
          dp.noise_multiplier = *sigma;
          st = fit(train.data, seed, dp, row);
        }
        if (st.ok()) {
          row.wallclock_s = seconds(t0);
          log << absl::StrFormat("[seed %d] dpsgd eps=%s sigma=%.4g: test %.4f (train %.4f)\n",
                                 seed, FormatNumber(eps), *sigma, row.test_acc,
                                 row.train_acc);
          result.rows.push_back(row);
        } else {
          fail(eps, "dpsgd", seed, st);
        }
      }
    }
  }
  if (!options.out_dir.empty()) {
    CADP_RETURN_IF_ERROR(WithExitCode(WriteOutputs(options.out_dir, result), ExitCode::kData));
  }
  return result;
}

std::string SummaryTable(const std::vector<ReportRow>& rows) {
  struct Cell {
    double sum = 0.0;
    std::size_t count = 0;
  };
  // Keyed by first appearance, so the table follows the grid order.
  std::vector<std::pair<std::string, std::optional<double>>> order;
  std::map<std::pair<std::string, double>, Cell> cells;
  for (const ReportRow& r : rows) {
    const auto key = std::make_pair(r.method, r.epsilon.value_or(-1.0));
    if (!cells.contains(key)) order.emplace_back(r.method, r.epsilon);
    cells[key].sum += r.test_acc;
    ++cells[key].count;
  }
  std::ostringstream out;
  out << absl::StrFormat("%-9s %8s %14s %6s\n", "method", "epsilon", "mean_test_acc", "seeds");
  for (const auto& [method, eps] : order) {
    const Cell& c = cells[{method, eps.value_or(-1.0)}];
    out << absl::StrFormat("%-9s %8s %14.4f %6d\n", method, eps ? FormatNumber(*eps) : "-",
                           c.sum / static_cast<double>(c.count), c.count);
  }
  return out.str();
}

absl::Status CmdSweep(const ExperimentConfig& config, const SweepOptions& options,
                      std::ostream& out) {
  CADP_ASSIGN_OR_RETURN(SweepResult r, RunSweep(config, options, out));
  out << "\n" << SummaryTable(r.rows);
  if (!options.out_dir.empty()) out << "wrote " << options.out_dir << "/report.csv\n";
  if (r.failures.empty()) return absl::OkStatus();
  const SweepFailure& f = r.failures.front();
  return WithExitCode(
      absl::InternalError(absl::StrCat(r.failures.size(), " sweep cell(s) failed; first: ",
                                       f.method, " seed ", f.seed, ": ", f.message)),
      static_cast<ExitCode>(f.exit_code));
}

}  // namespace cadp::cli
