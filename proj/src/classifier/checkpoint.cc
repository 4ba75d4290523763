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

#include "cadp/classifier/checkpoint.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "cadp/base/json_io.h"
#include "cadp/base/status_macros.h"

namespace cadp::classifier {

using nlohmann::json;

namespace {

// JSON has no infinity; C = inf and a vacuous epsilon are stored as strings.
json MaybeInfinite(double v) { return std::isinf(v) ? json(v > 0 ? "inf" : "-inf") : json(v); }

double MaybeInfiniteFrom(const json& j) {
  if (j.is_string()) {
    return (j.get<std::string>() == "-inf" ? -1.0 : 1.0) *
           std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

json Optional(const std::optional<double>& v) { return v ? MaybeInfinite(*v) : json(nullptr); }

std::optional<double> OptionalFrom(const json& j) {
  if (j.is_null()) return std::nullopt;
  return MaybeInfiniteFrom(j);
}

json ProvenanceToJson(const TrainingProvenance& p) {
  return {{"method", p.method},
          {"epsilon", Optional(p.epsilon)},
          {"sensitivity", Optional(p.sensitivity)},
          {"flow_nll", Optional(p.flow_nll)},
          {"train_acc", p.train_acc}};
}

absl::StatusOr<TrainingProvenance> ProvenanceFromJson(const json& j) {
  TrainingProvenance p;
  p.method = j.at("method").get<std::string>();
  if (p.method != "original" && p.method != "cadp" && p.method != "dpsgd") {
    return absl::InvalidArgumentError(absl::StrCat("unknown training method ", p.method));
  }
  p.epsilon = OptionalFrom(j.at("epsilon"));
  p.sensitivity = OptionalFrom(j.at("sensitivity"));
  p.flow_nll = OptionalFrom(j.at("flow_nll"));
  p.train_acc = j.at("train_acc").get<double>();
  return p;
}

}  // namespace

absl::Status SaveClassifier(const std::string& path, const ClassifierModel& model,
                            const ClassifierMetadata& metadata) {
  const ClassifierConfig& config = model.config();
  json features = json::array();
  for (const data::Feature& f : model.schema()) {
    features.push_back({{"name", f.name},
                        {"kind", f.kind == data::FeatureKind::kBinary ? "binary"
                                                                      : "continuous"}});
  }
  json doc;
  doc["format_version"] = kClassifierCheckpointVersion;
  doc["type"] = "cadp-classifier";
  doc["config"] = {
      {"depth", config.depth},
      {"width", config.width},
      {"activation", numerics::ActivationName(config.activation)},
      {"optimizer", config.optimizer == numerics::OptimizerKind::kAdam ? "adam" : "sgd"},
      {"learning_rate", config.learning_rate},
      {"batch_size", config.batch_size},
      {"steps", config.steps},
      {"log_every", config.log_every},
      {"seed", config.seed},
      {"num_classes", model.num_classes()},
      {"features", features}};
  doc["parameters"] = TensorsToJson(model.parameters());
  json curve = json::array();
  for (const LossPoint& p : metadata.curve) curve.push_back({p.step, p.loss});
  json meta = {{"train_seed", metadata.train_seed},
               {"steps", metadata.steps},
               {"curve", curve},
               {"provenance", ProvenanceToJson(metadata.provenance)}};
  if (metadata.dpsgd) {
    const DpSgdRecord& d = *metadata.dpsgd;
    meta["dpsgd"] = {{"noise_multiplier", d.noise_multiplier},
                     {"clip_norm", MaybeInfinite(d.clip_norm)},
                     {"delta", d.delta},
                     {"lot_size", d.lot_size},
                     {"dataset_size", d.dataset_size},
                     {"epsilon", MaybeInfinite(d.epsilon)},
                     {"vacuous", d.vacuous}};
  }
  doc["metadata"] = std::move(meta);
  return WriteJsonFile(path, doc);
}

absl::StatusOr<ClassifierCheckpoint> LoadClassifier(const std::string& path) {
  CADP_ASSIGN_OR_RETURN(json doc, ReadJsonFile(path));
  try {
    if (doc.at("type").get<std::string>() != "cadp-classifier") {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": not a classifier checkpoint"));
    }
    const int version = doc.at("format_version").get<int>();
    if (version != kClassifierCheckpointVersion) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": unsupported format_version ", version));
    }
    const json& jc = doc.at("config");
    ClassifierConfig config;
    config.depth = jc.at("depth").get<std::size_t>();
    config.width = jc.at("width").get<std::size_t>();
    if (!numerics::ParseActivation(jc.at("activation").get<std::string>(),
                                   &config.activation)) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": unknown activation"));
    }
    config.optimizer = jc.at("optimizer").get<std::string>() == "sgd"
                           ? numerics::OptimizerKind::kSgd
                           : numerics::OptimizerKind::kAdam;
    config.learning_rate = jc.at("learning_rate").get<double>();
    config.batch_size = jc.at("batch_size").get<std::size_t>();
    config.steps = jc.at("steps").get<std::size_t>();
    config.log_every = jc.at("log_every").get<std::size_t>();
    config.seed = jc.at("seed").get<uint64_t>();
    std::vector<data::Feature> schema;
    for (const json& f : jc.at("features")) {
      schema.push_back({f.at("name").get<std::string>(),
                        f.at("kind").get<std::string>() == "binary"
                            ? data::FeatureKind::kBinary
                            : data::FeatureKind::kContinuous});
    }
    CADP_ASSIGN_OR_RETURN(auto params, TensorsFromJson(doc.at("parameters")));
    CADP_ASSIGN_OR_RETURN(
        ClassifierModel model,
        ClassifierModel::FromParameters(config, std::move(schema),
                                        jc.at("num_classes").get<std::size_t>(),
                                        std::move(params)));
    ClassifierMetadata meta;
    const json& jm = doc.at("metadata");
    meta.train_seed = jm.at("train_seed").get<uint64_t>();
    meta.steps = jm.at("steps").get<std::size_t>();
    for (const json& p : jm.at("curve")) {
      meta.curve.push_back({p.at(0).get<std::size_t>(), p.at(1).get<double>()});
    }
    CADP_ASSIGN_OR_RETURN(meta.provenance, ProvenanceFromJson(jm.at("provenance")));
    if (jm.contains("dpsgd")) {
      const json& jd = jm["dpsgd"];
      meta.dpsgd = DpSgdRecord{jd.at("noise_multiplier").get<double>(),
                               MaybeInfiniteFrom(jd.at("clip_norm")),
                               jd.at("delta").get<double>(),
                               jd.at("lot_size").get<std::size_t>(),
                               jd.at("dataset_size").get<std::size_t>(),
                               MaybeInfiniteFrom(jd.at("epsilon")),
                               jd.at("vacuous").get<bool>()};
    }
    return ClassifierCheckpoint{std::move(model), std::move(meta)};
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", e.what()));
  }
}

}  // namespace cadp::classifier
