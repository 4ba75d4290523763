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

#include "cadp/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "cadp/base/json_io.h"
#include "cadp/base/rng.h"
#include "cadp/base/status_macros.h"
#include "cadp/classifier/checkpoint.h"
#include "cadp/cli/data_ref.h"
#include "cadp/cli/pipeline.h"
#include "cadp/cli/report.h"
#include "cadp/data/preprocess.h"
#include "cadp/flow/checkpoint.h"
#include "cadp/flow/diagnostics.h"
#include "nlohmann/json.hpp"

namespace cadp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

absl::Status ConfigError(const std::string& message) {
  return WithExitCode(absl::InvalidArgumentError(message), ExitCode::kConfig);
}

absl::Status CheckConfig(const ExperimentConfig& config) {
  return WithExitCode(ValidateExperimentConfig(config), ExitCode::kConfig);
}

void EnsureParent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
}

std::string WithoutJson(const std::string& path) {
  return absl::EndsWith(path, ".json") ? path.substr(0, path.size() - 5) : path;
}

absl::StatusOr<flow::FlowCheckpoint> LoadFlow(const std::string& path) {
  if (path.empty()) return ConfigError("no flow checkpoint given (--model)");
  auto ckpt = flow::LoadFlowCheckpoint(path);
  if (!ckpt.ok()) return WithExitCode(ckpt.status(), ExitCode::kData);
  return ckpt;
}

std::string Pass(bool ok) { return ok ? "PASS" : "FAIL"; }

absl::Status DiagnosticFailed(const std::string& what) {
  return WithExitCode(absl::FailedPreconditionError(what + ": diagnostic failed"),
                      ExitCode::kDiagnostic);
}

}  // namespace

double MaxRoundTripError(const flow::FlowModel& model, const numerics::Matrix& x,
                         const numerics::Matrix& c) {
  const numerics::Matrix z = model.Encode(x, c);
  const numerics::Matrix back = model.Inverse(z, c);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double e = std::abs(back(i, j) - x(i, j));
      worst = std::isnan(e) ? INFINITY : std::max(worst, e);
    }
  }
  return worst;
}

double MeanL2Distortion(const numerics::Matrix& a, const numerics::Matrix& b) {
  if (a.rows() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - b(i, j);
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(a.rows());
}

absl::StatusOr<std::string> FileHash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot read " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (auto it = std::istreambuf_iterator<char>(in); it != std::istreambuf_iterator<char>();
       ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", h);
}

absl::Status CmdTrainFlow(const TrainFlowOptions& o, std::ostream& out) {
  CADP_RETURN_IF_ERROR(CheckConfig(o.config));
  if (o.out.empty()) return ConfigError("train-flow needs --out");
  const std::string ref = o.data.empty() ? o.config.data.train : o.data;
  CADP_ASSIGN_OR_RETURN(LoadedData train, LoadDataRef(ref, o.config.data, Split::kTrain));

  auto trained = TrainFlowOn(o.config, train.data, o.seed);
  if (!trained.ok()) {
    if (trained.status().code() == absl::StatusCode::kAborted) {
      return WithExitCode(trained.status(), ExitCode::kDivergence);
    }
    return trained.status();
  }
  const flow::FlowTrainResult& r = trained->result;
  out << absl::StrFormat("trained %d steps on %d rows (%d held out); best held-out NLL %.4f "
                         "nats at step %d\n",
                         r.steps, r.train_rows, r.heldout_rows, r.best_heldout_nll,
                         r.best_step);
  if (const auto& d = trained->metadata.diagnostics) {
    out << absl::StrFormat(
        "latent diagnostics: %s (|mean| <= %.3g, variance in [%.3g, %.3g], |skew| <= %.3g, "
        "|excess kurtosis| <= %.3g)\n",
        d->passed ? "pass" : "FLAGGED", d->max_abs_mean, d->min_variance, d->max_variance,
        d->max_abs_skew, d->max_abs_excess_kurtosis);
    for (const std::string& f : d->findings) out << "  " << f << "\n";
  }

  std::string curve = absl::StrCat("step,nll\n");
  for (const flow::FlowCurvePoint& p : r.curve) {
    absl::StrAppend(&curve, p.step, ",", FormatNumber(p.heldout_nll), "\n");
  }
  const std::string curve_path =
      o.curve.empty() ? WithoutJson(o.out) + ".nll.csv" : o.curve;
  EnsureParent(o.out);
  EnsureParent(curve_path);
  CADP_RETURN_IF_ERROR(WithExitCode(WriteTextFile(curve_path, curve), ExitCode::kData));
  CADP_RETURN_IF_ERROR(WithExitCode(
      flow::SaveFlowCheckpoint(o.out, trained->model, trained->metadata), ExitCode::kData));
  out << "wrote " << o.out << " and " << curve_path << "\n";
  return absl::OkStatus();
}

absl::Status CmdPrivatize(const PrivatizeOptions& o, std::ostream& out) {
  CADP_RETURN_IF_ERROR(CheckConfig(o.config));
  if (!(o.epsilon > 0) || !std::isfinite(o.epsilon)) {
    return ConfigError(absl::StrCat("epsilon must be > 0, got ", FormatNumber(o.epsilon)));
  }
  const double s = o.sensitivity ? *o.sensitivity : SensitivityFor(o.config.privacy, o.epsilon);
  if (!(s > 0) || !std::isfinite(s)) {
    return ConfigError(absl::StrCat("sensitivity must be > 0, got ", FormatNumber(s)));
  }
  if (o.out.empty()) return ConfigError("privatize needs --out");
  CADP_ASSIGN_OR_RETURN(flow::FlowCheckpoint ckpt, LoadFlow(o.model));
  const std::string ref = o.data.empty() ? o.config.data.train : o.data;
  CADP_ASSIGN_OR_RETURN(LoadedData input, LoadDataRef(ref, o.config.data, Split::kTrain));
  if (input.format != DataFormat::kIdx && !absl::EndsWithIgnoreCase(o.out, ".csv")) {
    return ConfigError("output of non-image data is a CSV; --out must end in .csv");
  }

  std::vector<std::string> warnings;
  bool diagnostics_passed = true;
  if (const auto& d = ckpt.metadata.diagnostics; d && !d->passed) {
    diagnostics_passed = false;
    warnings.push_back(absl::StrCat("flow latent diagnostics did not pass: ",
                                    absl::StrJoin(d->findings, "; ")));
  }
  PrivatizeRequest request{o.epsilon, s, o.seed, !o.no_noise};
  auto priv = PrivatizeWith(ckpt.model, ckpt.metadata.condition, o.config.privacy,
                            input.data, request);
  if (!priv.ok()) {
    if (priv.status().code() == absl::StatusCode::kFailedPrecondition) {
      return WithExitCode(priv.status(), ExitCode::kMechanism);
    }
    return priv.status();
  }
  warnings.insert(warnings.end(), priv->warnings.begin(), priv->warnings.end());
  CADP_RETURN_IF_ERROR(WriteDataRef(priv->data, input.format, o.out, Split::kTrain, &warnings));

  privacy::PrivacyParams params{o.epsilon, s, o.config.privacy.clip_mode,
                                o.config.privacy.strict_accounting};
  CADP_ASSIGN_OR_RETURN(std::string hash, FileHash(o.model));
  json manifest = {
      {"type", "cadp-privatization-manifest"},
      {"version", 1},
      {"epsilon", o.epsilon},
      {"sensitivity", s},
      {"clip_mode", privacy::ClipModeName(params.clip_mode)},
      {"strict_accounting", params.strict_accounting},
      {"reported_epsilon", params.reported_epsilon()},
      {"seed", o.seed},
      {"noise", !o.no_noise},
      {"model", o.model},
      {"model_hash", hash},
      {"flow_nll", ckpt.metadata.final_nll},
      {"diagnostics_passed", diagnostics_passed},
      {"source", ref},
      {"rows", priv->data.size()},
      {"warnings", warnings},
  };
  CADP_RETURN_IF_ERROR(
      WithExitCode(WriteJsonFile(ManifestPath(o.out), manifest), ExitCode::kData));
  for (const std::string& w : warnings) out << "warning: " << w << "\n";
  out << absl::StrFormat("privatized %d rows at epsilon %s, s %s (reported epsilon %s)\n",
                         priv->data.size(), FormatNumber(o.epsilon), FormatNumber(s),
                         FormatNumber(params.reported_epsilon()));
  out << "wrote " << o.out << " and " << ManifestPath(o.out) << "\n";
  return absl::OkStatus();
}

absl::Status CmdTrainClassifier(const TrainClassifierOptions& o, std::ostream& out) {
  CADP_RETURN_IF_ERROR(CheckConfig(o.config));
  if (o.out.empty()) return ConfigError("train-classifier needs --out");
  const std::string ref = o.data.empty() ? o.config.data.train : o.data;
  CADP_ASSIGN_OR_RETURN(LoadedData train, LoadDataRef(ref, o.config.data, Split::kTrain));

  std::optional<dpsgd::DpSgdConfig> dp;
  if (o.dpsgd) {
    dp = DpSgdConfigFor(o.config, train.data.size(), o.dpsgd->noise_multiplier);
    dp->clip_norm = o.dpsgd->clip_norm;
    dp->delta = o.dpsgd->delta;
    if (absl::Status s = dpsgd::ValidateDpSgdConfig(*dp); !s.ok()) {
      return WithExitCode(s, ExitCode::kConfig);
    }
  }
  auto trained = TrainClassifierOn(o.config.classifier, train.data, o.seed, dp);
  if (!trained.ok()) {
    if (trained.status().code() == absl::StatusCode::kAborted) {
      return WithExitCode(trained.status(), ExitCode::kDivergence);
    }
    return trained.status();
  }
  classifier::TrainingProvenance& prov = trained->metadata.provenance;
  std::error_code ec;
  if (!dp && fs::exists(ManifestPath(ref), ec)) {
    auto manifest = ReadJsonFile(ManifestPath(ref));
    if (!manifest.ok()) return WithExitCode(manifest.status(), ExitCode::kData);
    try {
      prov.method = "cadp";
      prov.epsilon = manifest->at("epsilon").get<double>();
      prov.sensitivity = manifest->at("sensitivity").get<double>();
      prov.flow_nll = manifest->at("flow_nll").get<double>();
    } catch (const json::exception& e) {
      return WithExitCode(absl::DataLossError(ManifestPath(ref) + ": " + e.what()),
                          ExitCode::kData);
    }
  }
  for (const std::string& w : trained->warnings) out << "warning: " << w << "\n";

  std::string curve = "step,loss\n";
  for (const classifier::LossPoint& p : trained->metadata.curve) {
    absl::StrAppend(&curve, p.step, ",", FormatNumber(p.loss), "\n");
  }
  const std::string curve_path =
      o.curve.empty() ? WithoutJson(o.out) + ".curve.csv" : o.curve;
  EnsureParent(o.out);
  EnsureParent(curve_path);
  CADP_RETURN_IF_ERROR(WithExitCode(WriteTextFile(curve_path, curve), ExitCode::kData));
  CADP_RETURN_IF_ERROR(WithExitCode(
      classifier::SaveClassifier(o.out, trained->model, trained->metadata), ExitCode::kData));
  out << absl::StrFormat("%s classifier: train accuracy %.4f\n", prov.method, prov.train_acc);
  if (const auto& rec = trained->metadata.dpsgd) {
    out << absl::StrFormat("dp-sgd: sigma %s, C %s, delta %s, lot %d of %d -> epsilon %s%s\n",
                           FormatNumber(rec->noise_multiplier), FormatNumber(rec->clip_norm),
                           FormatNumber(rec->delta), rec->lot_size, rec->dataset_size,
                           FormatNumber(rec->epsilon), rec->vacuous ? " (vacuous)" : "");
  }
  out << "wrote " << o.out << " and " << curve_path << "\n";
  return absl::OkStatus();
}

absl::Status CmdEval(const EvalOptions& o, std::ostream& out) {
  if (o.model.empty()) return ConfigError("eval needs --model");
  auto ckpt = classifier::LoadClassifier(o.model);
  if (!ckpt.ok()) return WithExitCode(ckpt.status(), ExitCode::kData);
  const std::string ref = o.data.empty() ? o.config.data.test : o.data;
  CADP_ASSIGN_OR_RETURN(LoadedData test, LoadTestSplit(ref, o.config.data));
  const classifier::ClassifierModel& model = ckpt->model;
  if (test.data.schema != model.schema()) {
    return WithExitCode(
        absl::InvalidArgumentError(absl::StrCat(
            "schema mismatch: data has ", test.data.dim(), " features, the classifier was "
            "trained on ", model.input_dim(), " (names and kinds must agree)")),
        ExitCode::kSchema);
  }
  if (static_cast<std::size_t>(test.data.num_classes) > model.num_classes()) {
    return WithExitCode(absl::InvalidArgumentError(absl::StrCat(
                            "schema mismatch: data has ", test.data.num_classes,
                            " classes, the classifier ", model.num_classes())),
                        ExitCode::kSchema);
  }
  auto acc = classifier::Evaluate(model, test.data);
  if (!acc.ok()) return WithExitCode(acc.status(), ExitCode::kSchema);
  out << absl::StrFormat("accuracy %.4f\n", *acc);
  if (!o.report.empty()) {
    const classifier::TrainingProvenance& p = ckpt->metadata.provenance;
    ReportRow row;
    row.epsilon = p.epsilon;
    row.sensitivity = p.sensitivity;
    row.method = p.method;
    row.seed = ckpt->metadata.train_seed;
    row.train_acc = p.train_acc;
    row.test_acc = *acc;
    row.flow_nll = p.flow_nll;
    EnsureParent(o.report);
    CADP_RETURN_IF_ERROR(WithExitCode(AppendReportRow(o.report, row), ExitCode::kData));
  }
  return absl::OkStatus();
}

absl::StatusOr<DiagnoseMode> ParseDiagnoseMode(const std::string& name) {
  if (name == "invertibility") return DiagnoseMode::kInvertibility;
  if (name == "latent-normality") return DiagnoseMode::kLatentNormality;
  if (name == "dp-ratio") return DiagnoseMode::kDpRatio;
  return absl::InvalidArgumentError(
      "unknown diagnose mode '" + name + "' (invertibility, latent-normality, dp-ratio)");
}

absl::Status CmdDiagnose(const DiagnoseOptions& o, std::ostream& out) {
  if (o.mode == DiagnoseMode::kDpRatio) {
    if (!(o.epsilon > 0) || !std::isfinite(o.epsilon)) {
      return ConfigError(absl::StrCat("epsilon must be > 0, got ", FormatNumber(o.epsilon)));
    }
    if (!(o.sensitivity > 0)) return ConfigError("sensitivity must be > 0");
    const double eps = o.epsilon;
    const double s = o.sensitivity;
    auto r = privacy::EmpiricalDpRatio(
        [eps, s](double x, Rng& rng) { return privacy::LaplaceMechanism(x, s, eps, rng); },
        0.0, s, o.trials, o.bins, o.seed);
    if (!r.ok()) return WithExitCode(r.status(), ExitCode::kConfig);
    const double bound = eps + o.tolerance;
    const bool ok = r->max_log_ratio <= bound;
    out << "mode dp-ratio\n"
        << "epsilon " << FormatNumber(eps) << "\n"
        << "sensitivity " << FormatNumber(s) << "\n"
        << "trials " << o.trials << "\n"
        << "bins_used " << r->bins_used << "\n"
        << "max_log_ratio " << FormatNumber(r->max_log_ratio) << "\n"
        << "bound " << FormatNumber(bound) << "\n"
        << "result " << Pass(ok) << "\n";
    return ok ? absl::OkStatus() : DiagnosticFailed("dp-ratio");
  }

  CADP_ASSIGN_OR_RETURN(flow::FlowCheckpoint ckpt, LoadFlow(o.model));
  const std::string ref = o.data.empty() ? o.config.data.test : o.data;
  CADP_ASSIGN_OR_RETURN(LoadedData loaded, LoadTestSplit(ref, o.config.data));
  data::LabeledDataset d = std::move(loaded.data);
  if (o.samples > 0 && d.size() > o.samples) {
    std::vector<std::size_t> rows(o.samples);
    for (std::size_t i = 0; i < o.samples; ++i) rows[i] = i;
    d = data::SelectRows(d, rows);
  }
  if (o.mode == DiagnoseMode::kLatentNormality && ckpt.metadata.input_noise > 0) {
    CADP_ASSIGN_OR_RETURN(d, data::Dequantize(std::move(d), ckpt.metadata.input_noise,
                                              MixSeed(o.seed ^ 0xa4093822299f31d0)));
  }
  auto inputs = data::MakeFlowInputs(d, ckpt.metadata.condition);
  if (!inputs.ok()) return WithExitCode(inputs.status(), ExitCode::kSchema);
  if (inputs->x.cols() != ckpt.model.dim() ||
      inputs->conditions.cols() != ckpt.model.cond_dim()) {
    return WithExitCode(absl::InvalidArgumentError("data does not match the flow's shape"),
                        ExitCode::kSchema);
  }

  if (o.mode == DiagnoseMode::kInvertibility) {
    const double err = MaxRoundTripError(ckpt.model, inputs->x, inputs->conditions);
    const bool ok = err < o.max_error;
    out << "mode invertibility\n"
        << "samples " << d.size() << "\n"
        << "max_roundtrip_error " << FormatNumber(err) << "\n"
        << "threshold " << FormatNumber(o.max_error) << "\n"
        << "result " << Pass(ok) << "\n";
    return ok ? absl::OkStatus() : DiagnosticFailed("invertibility");
  }

  if (d.size() < 2) return ConfigError("latent-normality needs at least 2 samples");
  const flow::LatentDiagnostics diag =
      flow::DiagnoseModel(ckpt.model, inputs->x, inputs->conditions);
  const flow::NormalityThresholds t;
  out << "mode latent-normality\n"
      << "samples " << diag.samples << "\n"
      << "max_abs_mean " << FormatNumber(diag.MaxAbsMean()) << " (<= " << t.max_abs_mean
      << ")\n"
      << "variance_range " << FormatNumber(diag.MinVariance()) << " "
      << FormatNumber(diag.MaxVariance()) << " (in [" << t.min_variance << ", "
      << t.max_variance << "])\n"
      << "max_abs_skew " << FormatNumber(diag.MaxAbsSkew()) << " (<= " << t.max_abs_skew
      << ")\n"
      << "max_abs_excess_kurtosis " << FormatNumber(diag.MaxAbsExcessKurtosis()) << " (<= "
      << t.max_abs_excess_kurtosis << ")\n"
      << "max_abs_correlation " << FormatNumber(diag.max_abs_correlation) << "\n";
  for (const std::string& f : diag.findings) out << "finding " << f << "\n";
  out << "result " << Pass(diag.passed) << "\n";
  return diag.passed ? absl::OkStatus() : DiagnosticFailed("latent-normality");
}

}  // namespace cadp::cli
