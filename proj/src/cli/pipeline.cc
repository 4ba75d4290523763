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

#include "cadp/cli/pipeline.h"

#include <algorithm>

#include "cadp/base/rng.h"
#include "cadp/base/status_macros.h"
#include "cadp/cli/exit_codes.h"
#include "cadp/data/preprocess.h"
#include "cadp/flow/diagnostics.h"

namespace cadp::cli {

absl::StatusOr<TrainedFlow> TrainFlowOn(const ExperimentConfig& config,
                                        const data::LabeledDataset& train, uint64_t seed) {
  const data::ConditionSpec condition = ConditionFromConfig(config.data);
  CADP_ASSIGN_OR_RETURN(data::FlowInputs inputs, data::MakeFlowInputs(train, condition));
  CADP_ASSIGN_OR_RETURN(
      flow::FlowModel model,
      flow::FlowModel::Create(FlowConfigFor(config.flow, inputs.x.cols(),
                                            inputs.conditions.cols(), seed)));
  flow::FlowTrainConfig tc = config.flow.train;
  tc.input_noise = config.flow.input_noise;
  tc.seed = seed;
  CADP_ASSIGN_OR_RETURN(flow::FlowTrainResult result,
                        flow::TrainMle(model, train, condition, tc));

  flow::FlowMetadata meta;
  meta.train_seed = seed;
  meta.steps = result.steps;
  meta.final_nll = result.best_heldout_nll;
  meta.input_noise = tc.input_noise;
  meta.condition = condition;
  // Diagnose what the flow was fit to: the data with its training noise.
  data::LabeledDataset probe = train;
  if (tc.input_noise > 0) {
    CADP_ASSIGN_OR_RETURN(probe, data::Dequantize(std::move(probe), tc.input_noise,
                                                  MixSeed(seed ^ 0xa4093822299f31d0)));
  }
  CADP_ASSIGN_OR_RETURN(data::FlowInputs probe_in, data::MakeFlowInputs(probe, condition));
  if (probe_in.x.rows() >= 2) {
    meta.diagnostics = flow::Summarize(
        flow::DiagnoseModel(model, probe_in.x, probe_in.conditions));
  }
  return TrainedFlow{std::move(model), std::move(meta), std::move(result)};
}

absl::StatusOr<privacy::PrivateDataset> PrivatizeWith(const flow::FlowModel& model,
                                                      const data::ConditionSpec& condition,
                                                      const PrivacyConfig& privacy_config,
                                                      const data::LabeledDataset& data,
                                                      const PrivatizeRequest& request) {
  privacy::PrivacyParams params;
  params.epsilon = request.epsilon;
  params.sensitivity = request.sensitivity;
  params.clip_mode = privacy_config.clip_mode;
  params.strict_accounting = privacy_config.strict_accounting;
  CADP_RETURN_IF_ERROR(params.Validate());
  if (data.empty()) return absl::InvalidArgumentError("privatize: empty dataset");
  CADP_ASSIGN_OR_RETURN(data::FlowInputs inputs, data::MakeFlowInputs(data, condition));
  if (inputs.x.cols() != model.dim() || inputs.conditions.cols() != model.cond_dim()) {
    return WithExitCode(absl::InvalidArgumentError(
        "data does not match the flow: " + std::to_string(inputs.x.cols()) + " features / " +
        std::to_string(inputs.conditions.cols()) + " condition slots, flow expects " +
        std::to_string(model.dim()) + " / " + std::to_string(model.cond_dim())),
        ExitCode::kSchema);
  }
  CADP_ASSIGN_OR_RETURN(privacy::PrivatizeOutput out,
                        privacy::CadpPrivatize(model, inputs.x, inputs.conditions, params,
                                               request.seed, request.add_noise));
  CADP_ASSIGN_OR_RETURN(data::LabeledDataset result,
                        data::WithFlowFeatures(data, condition, out.x));
  return privacy::PrivateDataset{std::move(result), std::move(out.warnings)};
}

absl::StatusOr<TrainedClassifier> TrainClassifierOn(
    const classifier::ClassifierConfig& config_in, const data::LabeledDataset& train,
    uint64_t seed, const std::optional<dpsgd::DpSgdConfig>& dp) {
  if (train.empty()) return absl::InvalidArgumentError("empty training set");
  classifier::ClassifierConfig config = config_in;
  config.seed = seed;
  classifier::ClassifierModel model = classifier::ClassifierModel::Create(
      config, train.schema, static_cast<std::size_t>(train.num_classes));
  classifier::ClassifierMetadata meta;
  meta.train_seed = seed;
  std::vector<std::string> warnings;
  if (dp) {
    CADP_RETURN_IF_ERROR(dpsgd::ValidateDpSgdConfig(*dp));
    CADP_ASSIGN_OR_RETURN(dpsgd::DpTrainResult r, dpsgd::TrainDpSgd(model, train, *dp));
    meta.steps = r.train.steps;
    meta.curve = r.train.curve;
    meta.dpsgd = classifier::DpSgdRecord{dp->noise_multiplier, dp->clip_norm, dp->delta,
                                         dp->lot_size, train.size(), r.privacy.epsilon,
                                         r.privacy.vacuous};
    meta.provenance.method = "dpsgd";
    meta.provenance.epsilon = r.privacy.epsilon;
    warnings = r.train.warnings;
  } else {
    CADP_ASSIGN_OR_RETURN(classifier::TrainResult r,
                          classifier::TrainClassifier(model, train));
    meta.steps = r.steps;
    meta.curve = r.curve;
    meta.provenance.method = "original";
    warnings = r.warnings;
  }
  CADP_ASSIGN_OR_RETURN(meta.provenance.train_acc, classifier::Evaluate(model, train));
  return TrainedClassifier{std::move(model), std::move(meta), std::move(warnings)};
}

dpsgd::DpSgdConfig DpSgdConfigFor(const ExperimentConfig& config, std::size_t n,
                                  double noise_multiplier) {
  dpsgd::DpSgdConfig dp;
  dp.clip_norm = config.dpsgd.clip_norm;
  dp.noise_multiplier = noise_multiplier;
  dp.lot_size = std::max<std::size_t>(1, std::min(config.classifier.batch_size, n));
  dp.learning_rate = config.classifier.learning_rate;
  dp.steps = config.classifier.steps;
  dp.delta = config.dpsgd.delta;
  return dp;
}

}  // namespace cadp::cli
