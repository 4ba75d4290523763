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

#include "cadp/cli/config.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "boost/property_tree/ini_parser.hpp"
#include "boost/property_tree/ptree.hpp"
#include "cadp/base/status_macros.h"

namespace cadp::cli {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

absl::StatusOr<double> ParseDouble(const std::string& s) {
  double v;
  if (!absl::SimpleAtod(s, &v)) return absl::InvalidArgumentError("not a number: " + s);
  return v;
}

absl::StatusOr<std::size_t> ParseSize(const std::string& s) {
  uint64_t v;
  if (!absl::SimpleAtoi(s, &v)) {
    return absl::InvalidArgumentError("not a non-negative integer: " + s);
  }
  return static_cast<std::size_t>(v);
}

absl::StatusOr<bool> ParseBool(const std::string& s) {
  const std::string l = absl::AsciiStrToLower(s);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  return absl::InvalidArgumentError("not a boolean: " + s);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  for (absl::string_view part : absl::StrSplit(s, ',', absl::SkipWhitespace())) {
    out.emplace_back(absl::StripAsciiWhitespace(part));
  }
  return out;
}

absl::StatusOr<std::vector<double>> ParseDoubleList(const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : SplitList(s)) {
    CADP_ASSIGN_OR_RETURN(double v, ParseDouble(part));
    out.push_back(v);
  }
  return out;
}

using Setter = std::function<absl::Status(const std::string&)>;
using Getter = std::function<std::string()>;

struct Key {
  Setter set;
  Getter get;
  bool is_path = false;
};

Key DoubleKey(double& field) {
  return {[&field](const std::string& s) -> absl::Status {
            CADP_ASSIGN_OR_RETURN(field, ParseDouble(s));
            return absl::OkStatus();
          },
          [&field] { return FormatDouble(field); }};
}

Key SizeKey(std::size_t& field) {
  return {[&field](const std::string& s) -> absl::Status {
            CADP_ASSIGN_OR_RETURN(field, ParseSize(s));
            return absl::OkStatus();
          },
          [&field] { return absl::StrCat(field); }};
}

Key Uint64Key(uint64_t& field) {
  return {[&field](const std::string& s) -> absl::Status {
            CADP_ASSIGN_OR_RETURN(std::size_t v, ParseSize(s));
            field = v;
            return absl::OkStatus();
          },
          [&field] { return absl::StrCat(field); }};
}

Key BoolKey(bool& field) {
  return {[&field](const std::string& s) -> absl::Status {
            CADP_ASSIGN_OR_RETURN(field, ParseBool(s));
            return absl::OkStatus();
          },
          [&field] { return field ? "true" : "false"; }};
}

Key StringKey(std::string& field, bool is_path = false) {
  return {[&field](const std::string& s) {
            field = s;
            return absl::OkStatus();
          },
          [&field] { return field; }, is_path};
}

Key ActivationKey(numerics::Activation& field) {
  return {[&field](const std::string& s) {
            return numerics::ParseActivation(s, &field)
                       ? absl::OkStatus()
                       : absl::InvalidArgumentError("unknown activation " + s);
          },
          [&field] { return std::string(numerics::ActivationName(field)); }};
}

// Every configurable key, bound to `c`.
std::map<std::string, Key> KeyTable(ExperimentConfig& c) {
  std::map<std::string, Key> t;
  t["experiment.name"] = StringKey(c.name);
  t["experiment.seeds"] = {[&c](const std::string& s) -> absl::Status {
                             c.seeds.clear();
                             for (const std::string& part : SplitList(s)) {
                               CADP_ASSIGN_OR_RETURN(std::size_t v, ParseSize(part));
                               c.seeds.push_back(v);
                             }
                             return absl::OkStatus();
                           },
                           [&c] { return absl::StrJoin(c.seeds, ","); }};
  t["experiment.record_wallclock"] = BoolKey(c.record_wallclock);

  t["data.train"] = StringKey(c.data.train, true);
  t["data.test"] = StringKey(c.data.test, true);
  t["data.label_column"] = StringKey(c.data.label_column);
  t["data.binary_columns"] = {[&c](const std::string& s) {
                                c.data.binary_columns = SplitList(s);
                                return absl::OkStatus();
                              },
                              [&c] { return absl::StrJoin(c.data.binary_columns, ","); }};
  t["data.label_bins"] = SizeKey(c.data.label_bins);
  t["data.condition"] = StringKey(c.data.condition);
  t["data.synthetic_train"] = SizeKey(c.data.synthetic_train);
  t["data.synthetic_test"] = SizeKey(c.data.synthetic_test);
  t["data.seed"] = Uint64Key(c.data.seed);

  FlowPreset& f = c.flow;
  t["flow.coupling"] = {[&f](const std::string& s) -> absl::Status {
                          CADP_ASSIGN_OR_RETURN(f.coupling, flow::ParseCouplingKind(s));
                          return absl::OkStatus();
                        },
                        [&f] { return std::string(flow::CouplingKindName(f.coupling)); }};
  t["flow.blocks"] = SizeKey(f.blocks);
  t["flow.width"] = SizeKey(f.width);
  t["flow.hidden_layers"] = SizeKey(f.hidden_layers);
  t["flow.activation"] = ActivationKey(f.activation);
  t["flow.clamp"] = DoubleKey(f.clamp);
  t["flow.input_noise"] = DoubleKey(f.input_noise);
  t["flow.input_scale"] = DoubleKey(f.input_scale);
  t["flow.learning_rate"] = DoubleKey(f.train.learning_rate);
  t["flow.batch_size"] = SizeKey(f.train.batch_size);
  t["flow.steps"] = SizeKey(f.train.steps);
  t["flow.eval_every"] = SizeKey(f.train.eval_every);
  t["flow.holdout_fraction"] = DoubleKey(f.train.holdout_fraction);
  t["flow.max_grad_norm"] = DoubleKey(f.train.max_grad_norm);

  PrivacyConfig& p = c.privacy;
  t["privacy.epsilons"] = {[&p](const std::string& s) -> absl::Status {
                             CADP_ASSIGN_OR_RETURN(p.epsilons, ParseDoubleList(s));
                             return absl::OkStatus();
                           },
                           [&p] {
                             std::vector<std::string> parts;
                             for (double e : p.epsilons) parts.push_back(FormatDouble(e));
                             return absl::StrJoin(parts, ",");
                           }};
  t["privacy.sensitivity_rule"] = {
      [&p](const std::string& s) -> absl::Status {
        CADP_ASSIGN_OR_RETURN(p.sensitivity_rule, privacy::ParseSensitivityRule(s));
        return absl::OkStatus();
      },
      [&p] { return std::string(privacy::SensitivityRuleName(p.sensitivity_rule)); }};
  t["privacy.sensitivity"] = DoubleKey(p.sensitivity);
  t["privacy.clip_mode"] = {[&p](const std::string& s) -> absl::Status {
                              CADP_ASSIGN_OR_RETURN(p.clip_mode, privacy::ParseClipMode(s));
                              return absl::OkStatus();
                            },
                            [&p] { return std::string(privacy::ClipModeName(p.clip_mode)); }};
  t["privacy.strict_accounting"] = BoolKey(p.strict_accounting);

  classifier::ClassifierConfig& k = c.classifier;
  t["classifier.depth"] = SizeKey(k.depth);
  t["classifier.width"] = SizeKey(k.width);
  t["classifier.activation"] = ActivationKey(k.activation);
  t["classifier.optimizer"] = {
      [&k](const std::string& s) {
        if (s == "adam") {
          k.optimizer = numerics::OptimizerKind::kAdam;
        } else if (s == "sgd") {
          k.optimizer = numerics::OptimizerKind::kSgd;
        } else {
          return absl::InvalidArgumentError("unknown optimizer " + s);
        }
        return absl::OkStatus();
      },
      [&k] { return std::string(k.optimizer == numerics::OptimizerKind::kAdam ? "adam" : "sgd"); }};
  t["classifier.learning_rate"] = DoubleKey(k.learning_rate);
  t["classifier.batch_size"] = SizeKey(k.batch_size);
  t["classifier.steps"] = SizeKey(k.steps);
  t["classifier.log_every"] = SizeKey(k.log_every);

  t["dpsgd.clip_norm"] = DoubleKey(c.dpsgd.clip_norm);
  t["dpsgd.delta"] = DoubleKey(c.dpsgd.delta);
  return t;
}

absl::Status SetKey(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
  auto table = KeyTable(config);
  auto it = table.find(key);
  if (it == table.end()) return absl::InvalidArgumentError("unknown config key " + key);
  if (absl::Status s = it->second.set(value); !s.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(key, ": ", s.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> Expand(const std::string& value) {
  std::string out;
  std::size_t i = 0;
  while (i < value.size()) {
    if (value.compare(i, 2, "${") == 0) {
      const std::size_t close = value.find('}', i);
      if (close == std::string::npos) {
        return absl::InvalidArgumentError("unterminated ${ in " + value);
      }
      const std::string name = value.substr(i + 2, close - i - 2);
      const char* env = std::getenv(name.c_str());
      if (env == nullptr) {
        return absl::InvalidArgumentError("environment variable " + name + " is not set");
      }
      out += env;
      i = close + 1;
    } else {
      out += value[i++];
    }
  }
  return out;
}

std::string ResolvePath(const std::string& value, const std::filesystem::path& base) {
  if (value.empty() || value.starts_with("synthetic:")) return value;
  std::filesystem::path p(value);
  if (p.is_absolute()) return value;
  return (base / p).lexically_normal().string();
}

ExperimentConfig MnistPreset() {
  ExperimentConfig c;
  c.name = "mnist";
  c.data.train = "${CADP_MNIST_DIR}";
  c.data.test = "${CADP_MNIST_DIR}";
  c.flow.coupling = flow::CouplingKind::kGin;
  // 2 x 4 convolutional + 2 fully connected blocks, all fully connected here.
  c.flow.blocks = 10;
  c.flow.width = 128;
  c.flow.input_noise = 0.15;
  c.flow.input_scale = 0.15;
  c.flow.train.learning_rate = 5e-4;
  c.flow.train.batch_size = 512;
  c.flow.train.steps = 400;
  c.flow.train.eval_every = 25;
  c.classifier.depth = 2;
  c.classifier.width = 128;
  c.classifier.learning_rate = 5e-4;
  c.classifier.batch_size = 512;
  c.classifier.steps = 150;
  c.classifier.log_every = 10;
  return c;
}

ExperimentConfig DiabetesPreset() {
  ExperimentConfig c;
  c.name = "diabetes";
  c.data.train = "synthetic:categorical-mixture";
  c.data.test = "synthetic:categorical-mixture";
  c.data.synthetic_train = 442;
  c.data.synthetic_test = 442;
  c.data.condition = "sex";
  c.flow.coupling = flow::CouplingKind::kGin;
  c.flow.blocks = 4;
  c.flow.width = 64;
  c.flow.input_noise = 0.02;
  c.flow.train.learning_rate = 1e-4;
  c.flow.train.batch_size = 442;
  c.flow.train.steps = 3000;
  c.flow.train.eval_every = 100;
  c.privacy.epsilons = {1.0};
  c.privacy.sensitivity_rule = privacy::SensitivityRule::kFixed;
  c.privacy.sensitivity = 1.0;
  c.classifier.width = 64;
  c.classifier.batch_size = 64;
  c.classifier.steps = 500;
  return c;
}

ExperimentConfig ToyPreset() {
  ExperimentConfig c;
  c.name = "toy";
  c.data.train = "synthetic:two-gaussians";
  c.data.test = "synthetic:two-gaussians";
  c.data.synthetic_train = 4000;
  c.data.synthetic_test = 1000;
  c.flow.blocks = 4;
  c.flow.width = 32;
  c.flow.train.learning_rate = 3e-3;
  c.flow.train.batch_size = 256;
  c.flow.train.steps = 1500;
  c.flow.train.eval_every = 100;
  c.privacy.epsilons = {0.2, 1.0, 10.0};
  // In 2-d the capped rule's s = 4 puts every latent far in the tails.
  c.privacy.sensitivity_rule = privacy::SensitivityRule::kFixed;
  c.privacy.sensitivity = 1.0;
  c.classifier.width = 16;
  c.classifier.learning_rate = 1e-2;
  c.classifier.batch_size = 64;
  c.classifier.steps = 300;
  c.classifier.log_every = 20;
  c.seeds = {0};
  return c;
}

}  // namespace

absl::StatusOr<std::string> ExpandVariables(const std::string& value) {
  return Expand(value);
}

std::vector<std::string> PresetNames() { return {"mnist", "diabetes", "toy"}; }

absl::StatusOr<ExperimentConfig> PresetConfig(const std::string& name) {
  const std::string l = absl::AsciiStrToLower(name);
  if (l == "mnist") return MnistPreset();
  if (l == "diabetes") return DiabetesPreset();
  if (l == "toy") return ToyPreset();
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown preset '", name, "' (known: ", absl::StrJoin(PresetNames(), ", "), ")"));
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    return absl::InvalidArgumentError(e.what());
  }
  ExperimentConfig config;
  if (auto preset = tree.get_optional<std::string>("experiment.preset")) {
    CADP_ASSIGN_OR_RETURN(config, PresetConfig(*preset));
  }
  const std::filesystem::path base =
      std::filesystem::absolute(std::filesystem::path(path)).parent_path();
  const auto table = KeyTable(config);
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": key '", section, "' outside a section"));
    }
    for (const auto& [key, value] : entries) {
      const std::string full = absl::StrCat(section, ".", key);
      if (full == "experiment.preset") continue;
      CADP_ASSIGN_OR_RETURN(std::string expanded, Expand(value.data()));
      auto it = table.find(full);
      if (it != table.end() && it->second.is_path) expanded = ResolvePath(expanded, base);
      if (absl::Status s = SetKey(config, full, expanded); !s.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(path, ": ", s.message()));
      }
    }
  }
  return config;
}

absl::Status ApplyOverride(ExperimentConfig& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    return absl::InvalidArgumentError("override must look like section.key=value: " +
                                      assignment);
  }
  const std::string key(absl::StripAsciiWhitespace(assignment.substr(0, eq)));
  const std::string value(absl::StripAsciiWhitespace(assignment.substr(eq + 1)));
  CADP_ASSIGN_OR_RETURN(std::string expanded, Expand(value));
  return SetKey(config, key, expanded);
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& c) {
  if (c.privacy.epsilons.empty()) return absl::InvalidArgumentError("privacy.epsilons is empty");
  for (double e : c.privacy.epsilons) {
    if (!(e > 0) || !std::isfinite(e)) {
      return absl::InvalidArgumentError(
          absl::StrCat("privacy.epsilons: epsilon must be > 0, got ", FormatDouble(e)));
    }
    if (!(SensitivityFor(c.privacy, e) > 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("sensitivity rule gives s <= 0 at epsilon ", FormatDouble(e)));
    }
  }
  if (c.seeds.empty()) return absl::InvalidArgumentError("experiment.seeds is empty");
  if (c.flow.blocks == 0 || c.flow.width == 0) {
    return absl::InvalidArgumentError("flow.blocks and flow.width must be positive");
  }
  if (!(c.flow.input_noise >= 0)) return absl::InvalidArgumentError("flow.input_noise < 0");
  if (!(c.flow.input_scale > 0)) return absl::InvalidArgumentError("flow.input_scale <= 0");
  if (!(c.flow.train.learning_rate > 0) || c.flow.train.batch_size == 0 ||
      c.flow.train.steps == 0 || c.flow.train.eval_every == 0) {
    return absl::InvalidArgumentError(
        "flow.learning_rate, batch_size, steps and eval_every must be positive");
  }
  if (c.classifier.depth == 0 || c.classifier.width == 0 || c.classifier.batch_size == 0 ||
      c.classifier.steps == 0 || c.classifier.log_every == 0 ||
      !(c.classifier.learning_rate > 0)) {
    return absl::InvalidArgumentError("classifier settings must be positive");
  }
  if (!(c.dpsgd.clip_norm > 0)) return absl::InvalidArgumentError("dpsgd.clip_norm must be > 0");
  if (!(c.dpsgd.delta > 0 && c.dpsgd.delta < 1)) {
    return absl::InvalidArgumentError("dpsgd.delta must lie in (0, 1)");
  }
  return absl::OkStatus();
}

data::ConditionSpec ConditionFromConfig(const DataConfig& data) {
  if (data.condition.empty() || data.condition == "label") return {};
  return {data::ConditionSource::kBinaryFeature, data.condition};
}

flow::FlowConfig FlowConfigFor(const FlowPreset& preset, std::size_t dim,
                               std::size_t cond_dim, uint64_t seed) {
  flow::FlowConfig c;
  c.dim = dim;
  c.cond_dim = cond_dim;
  c.blocks.assign(preset.blocks, preset.coupling);
  c.hidden.assign(preset.hidden_layers, preset.width);
  c.activation = preset.activation;
  c.clamp = preset.clamp;
  c.input_scale = preset.input_scale;
  c.seed = seed;
  return c;
}

double SensitivityFor(const PrivacyConfig& privacy, double epsilon) {
  return privacy::ApplySensitivityRule(privacy.sensitivity_rule, epsilon, privacy.sensitivity);
}

std::string RenderConfig(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  const auto table = KeyTable(copy);
  std::ostringstream out;
  std::string section;
  for (const auto& [key, entry] : table) {
    const std::string s = key.substr(0, key.find('.'));
    if (s != section) {
      out << (section.empty() ? "" : "\n") << "[" << s << "]\n";
      section = s;
    }
    out << key.substr(key.find('.') + 1) << " = " << entry.get() << "\n";
  }
  return out.str();
}

}  // namespace cadp::cli
