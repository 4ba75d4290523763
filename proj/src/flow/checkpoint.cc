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

#include "cadp/flow/checkpoint.h"

#include "absl/strings/str_cat.h"
#include "cadp/base/json_io.h"
#include "cadp/base/status_macros.h"

namespace cadp::flow {

using nlohmann::json;

DiagnosticsSummary Summarize(const LatentDiagnostics& d) {
  return {d.passed,
          d.MaxAbsMean(),
          d.MinVariance(),
          d.MaxVariance(),
          d.MaxAbsSkew(),
          d.MaxAbsExcessKurtosis(),
          d.max_abs_correlation,
          d.findings};
}

absl::Status SaveFlowCheckpoint(const std::string& path, const FlowModel& model,
                                const FlowMetadata& metadata) {
  const FlowConfig& config = model.config();
  json kinds = json::array();
  json perm_seeds = json::array();
  for (std::size_t k = 0; k < config.blocks.size(); ++k) {
    kinds.push_back(CouplingKindName(config.blocks[k]));
    perm_seeds.push_back(PermutationSeed(config.seed, k));
  }
  json doc;
  doc["format_version"] = kFlowCheckpointVersion;
  doc["type"] = "cadp-flow";
  doc["config"] = {{"dim", config.dim},
                   {"cond_dim", config.cond_dim},
                   {"blocks", kinds},
                   {"hidden", config.hidden},
                   {"activation", numerics::ActivationName(config.activation)},
                   {"clamp", config.clamp},
                   {"input_scale", config.input_scale},
                   {"seed", config.seed},
                   {"permutation_seeds", perm_seeds}};
  doc["parameters"] = TensorsToJson(model.parameters());
  json meta = {{"train_seed", metadata.train_seed},
               {"steps", metadata.steps},
               {"final_nll", metadata.final_nll},
               {"input_noise", metadata.input_noise},
               {"condition",
                {{"source", metadata.condition.source == data::ConditionSource::kLabelOneHot
                                ? "label"
                                : "feature"},
                 {"feature", metadata.condition.feature}}}};
  if (metadata.diagnostics.has_value()) {
    const DiagnosticsSummary& d = *metadata.diagnostics;
    meta["diagnostics"] = {{"passed", d.passed},
                           {"max_abs_mean", d.max_abs_mean},
                           {"min_variance", d.min_variance},
                           {"max_variance", d.max_variance},
                           {"max_abs_skew", d.max_abs_skew},
                           {"max_abs_excess_kurtosis", d.max_abs_excess_kurtosis},
                           {"max_abs_correlation", d.max_abs_correlation},
                           {"findings", d.findings}};
  }
  doc["metadata"] = std::move(meta);
  return WriteJsonFile(path, doc);
}

absl::StatusOr<FlowCheckpoint> LoadFlowCheckpoint(const std::string& path) {
  CADP_ASSIGN_OR_RETURN(json doc, ReadJsonFile(path));
  try {
    if (doc.at("type").get<std::string>() != "cadp-flow") {
      return absl::InvalidArgumentError(absl::StrCat(path, ": not a flow checkpoint"));
    }
    const int version = doc.at("format_version").get<int>();
    if (version != kFlowCheckpointVersion) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": unsupported format_version ", version));
    }
    const json& jc = doc.at("config");
    FlowConfig config;
    config.dim = jc.at("dim").get<std::size_t>();
    config.cond_dim = jc.at("cond_dim").get<std::size_t>();
    for (const json& k : jc.at("blocks")) {
      CADP_ASSIGN_OR_RETURN(CouplingKind kind, ParseCouplingKind(k.get<std::string>()));
      config.blocks.push_back(kind);
    }
    config.hidden = jc.at("hidden").get<std::vector<std::size_t>>();
    if (!numerics::ParseActivation(jc.at("activation").get<std::string>(),
                                   &config.activation)) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": unknown activation"));
    }
    config.clamp = jc.at("clamp").get<double>();
    config.input_scale = jc.at("input_scale").get<double>();
    config.seed = jc.at("seed").get<uint64_t>();
    const auto seeds = jc.at("permutation_seeds").get<std::vector<uint64_t>>();
    for (std::size_t k = 0; k < config.blocks.size(); ++k) {
      if (k >= seeds.size() || seeds[k] != PermutationSeed(config.seed, k)) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ": permutation seed of block ", k,
                         " does not match the model seed"));
      }
    }
    CADP_ASSIGN_OR_RETURN(auto params, TensorsFromJson(doc.at("parameters")));
    CADP_ASSIGN_OR_RETURN(FlowModel model, FlowModel::FromParameters(config, params));

    FlowMetadata meta;
    const json& jm = doc.at("metadata");
    meta.train_seed = jm.at("train_seed").get<uint64_t>();
    meta.steps = jm.at("steps").get<std::size_t>();
    meta.final_nll = jm.at("final_nll").get<double>();
    meta.input_noise = jm.at("input_noise").get<double>();
    const json& cond = jm.at("condition");
    meta.condition.source = cond.at("source").get<std::string>() == "label"
                                ? data::ConditionSource::kLabelOneHot
                                : data::ConditionSource::kBinaryFeature;
    meta.condition.feature = cond.at("feature").get<std::string>();
    if (jm.contains("diagnostics")) {
      const json& jd = jm["diagnostics"];
      DiagnosticsSummary d;
      d.passed = jd.at("passed").get<bool>();
      d.max_abs_mean = jd.at("max_abs_mean").get<double>();
      d.min_variance = jd.at("min_variance").get<double>();
      d.max_variance = jd.at("max_variance").get<double>();
      d.max_abs_skew = jd.at("max_abs_skew").get<double>();
      d.max_abs_excess_kurtosis = jd.at("max_abs_excess_kurtosis").get<double>();
      d.max_abs_correlation = jd.at("max_abs_correlation").get<double>();
      d.findings = jd.at("findings").get<std::vector<std::string>>();
      meta.diagnostics = d;
    }
    return FlowCheckpoint{std::move(model), std::move(meta)};
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", e.what()));
  }
}

}  // namespace cadp::flow
