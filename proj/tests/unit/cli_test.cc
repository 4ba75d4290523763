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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "cadp/base/json_io.h"
#include "cadp/classifier/checkpoint.h"
#include "cadp/cli/app.h"
#include "cadp/cli/commands.h"
#include "cadp/cli/config.h"
#include "cadp/cli/data_ref.h"
#include "cadp/cli/exit_codes.h"
#include "cadp/cli/report.h"
#include "cadp/cli/sweep.h"
#include "cadp/data/export.h"
#include "cadp/flow/checkpoint.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace cadp::cli {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

const std::string kToyFlow = std::string(CADP_SOURCE_DIR) + "/tests/fixtures/toy_flow.json";

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("cadp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string WriteFile(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

// Two features, label = sign of x0, a wide margin.
data::LabeledDataset Separable(std::size_t n, uint64_t seed) {
  Rng rng(seed);
  data::LabeledDataset d;
  d.features = numerics::Matrix(n, 2);
  d.labels.resize(n);
  d.schema = {{"x0"}, {"x1"}};
  d.normalization.resize(2);
  d.num_classes = 2;
  for (std::size_t i = 0; i < n; ++i) {
    d.labels[i] = static_cast<int>(i % 2);
    d.features(i, 0) = (d.labels[i] ? 3.0 : -3.0) + 0.3 * rng.Normal();
    d.features(i, 1) = rng.Normal();
  }
  return d;
}

ExperimentConfig TinyToy() {
  ExperimentConfig c = *PresetConfig("toy");
  c.data.synthetic_train = 400;
  c.data.synthetic_test = 200;
  c.flow.train.steps = 60;
  c.flow.train.eval_every = 20;
  c.classifier.steps = 40;
  c.privacy.epsilons = {0.5, 5.0};
  c.seeds = {0, 1};
  return c;
}

TEST(ConfigTest, PresetsCarryTheArchitectureTable) {
  const ExperimentConfig mnist = *PresetConfig("mnist");
  EXPECT_EQ(mnist.flow.coupling, flow::CouplingKind::kGin);
  EXPECT_EQ(mnist.flow.input_noise, 0.15);
  EXPECT_EQ(mnist.flow.train.learning_rate, 5e-4);
  EXPECT_EQ(mnist.flow.train.batch_size, 512u);
  EXPECT_EQ(mnist.classifier.depth, 2u);
  EXPECT_EQ(mnist.classifier.learning_rate, 5e-4);
  EXPECT_EQ(mnist.classifier.batch_size, 512u);
  EXPECT_EQ(mnist.classifier.optimizer, numerics::OptimizerKind::kAdam);
  EXPECT_EQ(mnist.privacy.sensitivity_rule, privacy::SensitivityRule::kHalfEpsilonCapped);
  EXPECT_EQ(mnist.privacy.epsilons, (std::vector<double>{0.2, 0.5, 1, 2, 10}));

  const ExperimentConfig diabetes = *PresetConfig("diabetes");
  EXPECT_EQ(diabetes.flow.coupling, flow::CouplingKind::kGin);
  EXPECT_EQ(diabetes.flow.blocks, 4u);
  EXPECT_EQ(diabetes.flow.input_noise, 0.02);
  EXPECT_EQ(diabetes.flow.train.learning_rate, 1e-4);
  EXPECT_EQ(diabetes.flow.train.batch_size, 442u);

  EXPECT_FALSE(PresetConfig("cifar").ok());
  for (const std::string& name : PresetNames()) {
    EXPECT_TRUE(ValidateExperimentConfig(*PresetConfig(name)).ok()) << name;
  }
}

TEST(ConfigTest, ShippedFilesMatchThePresets) {
  setenv("CADP_MNIST_DIR", "/data/mnist", 1);
  for (const std::string& name : PresetNames()) {
    auto loaded = LoadExperimentConfig(std::string(CADP_SOURCE_DIR) + "/configs/" + name + ".cfg");
    ASSERT_TRUE(loaded.ok()) << loaded.status();
    ExperimentConfig preset = *PresetConfig(name);
    if (name == "mnist") preset.data.train = preset.data.test = "/data/mnist";
    if (name == "toy") preset.seeds = {0};
    EXPECT_EQ(RenderConfig(*loaded), RenderConfig(preset)) << name;
  }
}

TEST(ConfigTest, FileOverridesPathsAndVariables) {
  const std::string dir = Scratch("config");
  setenv("CADP_TEST_EPS", "0.3", 1);
  const std::string path = WriteFile(dir + "/x.cfg",
                                     "# comment\n"
                                     "[experiment]\npreset = toy\nseeds = 4, 5\n"
                                     "[data]\ntrain = rel/train.csv\ntest = synthetic:two-moons\n"
                                     "[privacy]\nepsilons = ${CADP_TEST_EPS}, 2\n"
                                     "clip_mode = clip_only\n");
  auto c = LoadExperimentConfig(path);
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->name, "toy");
  EXPECT_EQ(c->seeds, (std::vector<uint64_t>{4, 5}));
  EXPECT_EQ(c->data.train, (fs::path(dir) / "rel/train.csv").lexically_normal().string());
  EXPECT_EQ(c->data.test, "synthetic:two-moons");
  EXPECT_EQ(c->privacy.epsilons, (std::vector<double>{0.3, 2}));
  EXPECT_EQ(c->privacy.clip_mode, privacy::ClipMode::kClipOnly);
  EXPECT_EQ(c->flow.train.learning_rate, 3e-3);  // from the preset

  ASSERT_TRUE(ApplyOverride(*c, "flow.steps = 7").ok());
  EXPECT_EQ(c->flow.train.steps, 7u);
  EXPECT_FALSE(ApplyOverride(*c, "flow.steps=-1").ok());
  EXPECT_FALSE(ApplyOverride(*c, "flow.nope=1").ok());
  EXPECT_FALSE(ApplyOverride(*c, "flow.steps").ok());
}

TEST(ConfigTest, RejectsBadFiles) {
  const std::string dir = Scratch("config_bad");
  auto unknown = LoadExperimentConfig(WriteFile(dir + "/a.cfg", "[flow]\nstepz = 3\n"));
  ASSERT_FALSE(unknown.ok());
  EXPECT_THAT(unknown.status().message(), HasSubstr("flow.stepz"));
  EXPECT_FALSE(LoadExperimentConfig(WriteFile(dir + "/b.cfg", "[flow]\nsteps = many\n")).ok());
  EXPECT_FALSE(LoadExperimentConfig(WriteFile(dir + "/c.cfg", "[data]\ntrain = ${CADP_UNSET_VAR_X}\n")).ok());
  EXPECT_FALSE(LoadExperimentConfig(dir + "/missing.cfg").ok());
}

TEST(ConfigTest, ValidationRejectsUnusableGrids) {
  ExperimentConfig c;
  c.privacy.epsilons = {};
  EXPECT_FALSE(ValidateExperimentConfig(c).ok());
  c.privacy.epsilons = {1.0, -0.5};
  EXPECT_FALSE(ValidateExperimentConfig(c).ok());
  c.privacy.epsilons = {1.0};
  c.privacy.sensitivity_rule = privacy::SensitivityRule::kFixed;
  c.privacy.sensitivity = 0.0;
  EXPECT_FALSE(ValidateExperimentConfig(c).ok());
  c.privacy.sensitivity = 1.0;
  EXPECT_TRUE(ValidateExperimentConfig(c).ok());
  c.seeds.clear();
  EXPECT_FALSE(ValidateExperimentConfig(c).ok());
}

TEST(ConfigTest, SensitivityRules) {
  PrivacyConfig p;
  EXPECT_EQ(SensitivityFor(p, 0.2), 0.1);
  EXPECT_EQ(SensitivityFor(p, 10.0), 4.0);
  p.sensitivity_rule = privacy::SensitivityRule::kHalfEpsilon;
  EXPECT_EQ(SensitivityFor(p, 10.0), 5.0);
  p.sensitivity_rule = privacy::SensitivityRule::kFixed;
  p.sensitivity = 0.5;
  EXPECT_EQ(SensitivityFor(p, 1.0), 0.5);
}

TEST(ExitCodeTest, PayloadAndDefaults) {
  EXPECT_EQ(ExitCodeOf(absl::OkStatus()), 0);
  EXPECT_EQ(ExitCodeOf(absl::InvalidArgumentError("x")), 2);
  EXPECT_EQ(ExitCodeOf(absl::NotFoundError("x")), 3);
  EXPECT_EQ(ExitCodeOf(absl::AbortedError("x")), 4);
  EXPECT_EQ(ExitCodeOf(absl::FailedPreconditionError("x")), 5);
  EXPECT_EQ(ExitCodeOf(absl::InternalError("x")), 1);
  EXPECT_EQ(ExitCodeOf(WithExitCode(absl::InvalidArgumentError("x"), ExitCode::kSchema)), 6);
  EXPECT_TRUE(WithExitCode(absl::OkStatus(), ExitCode::kData).ok());
}

TEST(ReportTest, RowsRoundTripInFrozenColumnOrder) {
  ReportRow r;
  r.epsilon = 0.2;
  r.sensitivity = 0.1;
  r.method = "cadp";
  r.seed = 2;
  r.train_acc = 0.98125;
  r.test_acc = 1.0 / 3.0;
  r.flow_nll = 1362.3612345678;
  EXPECT_EQ(FormatReportRow(r), "0.2,0.1,cadp,2,0.98125,0.3333333333333333,1362.3612345678,0");
  auto back = ParseReportRow(FormatReportRow(r));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(FormatReportRow(*back), FormatReportRow(r));
  EXPECT_EQ(back->test_acc, r.test_acc);

  ReportRow original;
  original.method = "original";
  EXPECT_EQ(FormatReportRow(original), ",,original,0,0,0,,0");
  EXPECT_FALSE(ParseReportRow("1,2,3").ok());
  EXPECT_EQ(std::string(kReportHeader),
            "epsilon,sensitivity,method,seed,train_acc,test_acc_on_original,flow_nll,"
            "wallclock_s");
}

TEST(DataRefTest, ResolvesEveryKind) {
  const std::string dir = Scratch("dataref");
  DataConfig config;
  config.synthetic_train = 30;
  config.synthetic_test = 20;
  auto train = LoadDataRef("synthetic:two-moons", config, Split::kTrain);
  auto test = LoadDataRef("synthetic:two-moons", config, Split::kTest);
  ASSERT_TRUE(train.ok() && test.ok());
  EXPECT_EQ(train->data.size(), 30u);
  EXPECT_EQ(test->data.size(), 20u);
  EXPECT_EQ(train->data.normalization, test->data.normalization);

  std::vector<std::string> warnings;
  ASSERT_TRUE(WriteDataRef(train->data, DataFormat::kExportedCsv, dir + "/d.csv", Split::kTrain,
                           &warnings).ok());
  auto csv = LoadDataRef(dir + "/d.csv", config, Split::kTrain);
  ASSERT_TRUE(csv.ok());
  EXPECT_EQ(csv->format, DataFormat::kExportedCsv);
  EXPECT_EQ(csv->data, train->data);

  WriteFile(dir + "/raw.csv", "a,b,label\n1,2,0\n3,5,1\n2,2,1\n");
  auto raw = LoadDataRef(dir + "/raw.csv", config, Split::kTrain);
  ASSERT_TRUE(raw.ok()) << raw.status();
  EXPECT_EQ(raw->format, DataFormat::kCsv);

  data::LabeledDataset img;
  img.features = numerics::Matrix(3, 4);
  img.features(1, 2) = 1.0;
  img.labels = {0, 1, 2};
  img.schema = {{"p0"}, {"p1"}, {"p2"}, {"p3"}};
  img.normalization.assign(4, {data::NormalizationKind::kMinMax, 0.0, 255.0});
  img.num_classes = 3;
  img.image_shape = std::make_pair(2, 2);
  ASSERT_TRUE(WriteDataRef(img, DataFormat::kIdx, dir + "/idx", Split::kTest, &warnings).ok());
  auto idx = LoadDataRef(dir + "/idx/", config, Split::kTest);
  ASSERT_TRUE(idx.ok()) << idx.status();
  EXPECT_EQ(idx->format, DataFormat::kIdx);
  EXPECT_EQ(idx->data.features, img.features);
  auto by_file = LoadDataRef(dir + "/idx/test-images-idx3-ubyte", config, Split::kTrain);
  ASSERT_TRUE(by_file.ok());
  EXPECT_EQ(by_file->data.labels, img.labels);

  EXPECT_EQ(ExitCodeOf(LoadDataRef(dir + "/none.csv", config, Split::kTrain).status()), 3);
  EXPECT_EQ(ExitCodeOf(LoadDataRef(dir + "/idx_missing", config, Split::kTrain).status()), 3);
  EXPECT_EQ(ExitCodeOf(LoadDataRef("synthetic:nope", config, Split::kTrain).status()), 2);
}

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Cli({"--help"}).code, 0);
  EXPECT_THAT(Cli({"--help"}).out, HasSubstr("train-flow"));
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"train-flow", "--preset", "nope", "--out", "x.json"}).code, 2);
  EXPECT_EQ(Cli({"train-classifier", "--preset", "nope", "--out", "x.json"}).code, 2);
  EXPECT_EQ(Cli({"train-flow", "--preset", "toy", "--config", "a.cfg"}).code, 2);
}

TEST(CliTest, PrintConfigShowsMnistFlowSettings) {
  const CliRun r = Cli({"train-flow", "--preset", "mnist", "--print-config"});
  ASSERT_EQ(r.code, 0);
  EXPECT_THAT(r.out, HasSubstr("[flow]"));
  EXPECT_THAT(r.out, HasSubstr("learning_rate = 5e-04"));
  EXPECT_THAT(r.out, HasSubstr("batch_size = 512"));
  EXPECT_THAT(r.out, HasSubstr("input_noise = 0.15"));
  const CliRun o = Cli({"train-flow", "--preset", "mnist", "--set", "flow.steps=9", "--print-config"});
  EXPECT_THAT(o.out, HasSubstr("steps = 9"));
}

TEST(CliTest, TrainFlowWritesCheckpointAndCurve) {
  const std::string dir = Scratch("train_flow");
  const CliRun r = Cli({"train-flow", "--preset", "toy", "--set", "flow.steps=200", "--out",
                     dir + "/f.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ckpt = flow::LoadFlowCheckpoint(dir + "/f.json");
  ASSERT_TRUE(ckpt.ok());
  EXPECT_TRUE(ckpt->metadata.diagnostics.has_value());
  const std::string curve = Slurp(dir + "/f.nll.csv");
  EXPECT_EQ(curve.substr(0, 9), "step,nll\n");
  // Converged: within 0.3 nats of the class entropy (standardized units).
  EXPECT_LT(ckpt->metadata.final_nll, 2.84 + 0.3);
}

TEST(CliTest, TrainFlowOnMissingDataExitsThreeWithoutCheckpoint) {
  const std::string dir = Scratch("missing");
  const CliRun r = Cli({"train-flow", "--preset", "toy", "--data", dir + "/nope.csv", "--out",
                     dir + "/f.json"});
  EXPECT_EQ(r.code, 3);
  EXPECT_THAT(r.err, HasSubstr("nope.csv"));
  EXPECT_FALSE(fs::exists(dir + "/f.json"));
  EXPECT_FALSE(fs::exists(dir + "/f.nll.csv"));
}

TEST(CliTest, TrainFlowDivergenceExitsFour) {
  const std::string dir = Scratch("diverge");
  const CliRun r = Cli({"train-flow", "--preset", "toy", "--set", "flow.learning_rate=1e30",
                     "--set", "flow.coupling=affine_glow", "--set", "flow.clamp=50", "--set",
                     "flow.steps=50", "--out", dir + "/f.json"});
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_FALSE(fs::exists(dir + "/f.json"));
}

TEST(CliTest, PrivatizeRejectsNonPositiveEpsilon) {
  const std::string dir = Scratch("priv_eps");
  for (const char* eps : {"0", "-1"}) {
    const CliRun r = Cli({"privatize", "--preset", "toy", "--model", kToyFlow, "--epsilon", eps,
                       "--out", dir + "/p.csv"});
    EXPECT_EQ(r.code, 2) << eps;
  }
  EXPECT_FALSE(fs::exists(dir + "/p.csv"));
}

TEST(CliTest, PrivatizeWritesDataAndManifest) {
  const std::string dir = Scratch("priv");
  const CliRun r = Cli({"privatize", "--preset", "toy", "--model", kToyFlow, "--epsilon", "2",
                     "--strict", "--seed", "5", "--out", dir + "/p.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto manifest = ReadJsonFile(dir + "/p.csv.manifest.json");
  ASSERT_TRUE(manifest.ok());
  EXPECT_EQ((*manifest)["epsilon"], 2.0);
  EXPECT_EQ((*manifest)["sensitivity"], 1.0);
  EXPECT_EQ((*manifest)["clip_mode"], "rescale_always");
  EXPECT_EQ((*manifest)["reported_epsilon"], 4.0);
  EXPECT_EQ((*manifest)["seed"], 5);
  EXPECT_EQ((*manifest)["model_hash"], *FileHash(kToyFlow));
  EXPECT_EQ((*manifest)["model_hash"].get<std::string>().size(), 16u);
  auto priv = data::ReadExportedCsv(dir + "/p.csv");
  ASSERT_TRUE(priv.ok());
  EXPECT_EQ(priv->size(), 4000u);

  // Same seed, same bytes.
  ASSERT_EQ(Cli({"privatize", "--preset", "toy", "--model", kToyFlow, "--epsilon", "2",
                 "--strict", "--seed", "5", "--out", dir + "/q.csv"}).code, 0);
  EXPECT_EQ(Slurp(dir + "/p.csv"), Slurp(dir + "/q.csv"));
}

TEST(CliTest, DistortionShrinksWithEpsilon) {
  const std::string dir = Scratch("priv_distortion");
  ExperimentConfig c = *PresetConfig("toy");
  auto original = LoadDataRef(c.data.train, c.data, Split::kTrain);
  ASSERT_TRUE(original.ok());
  double previous = INFINITY;
  for (const char* eps : {"0.2", "10"}) {
    const std::string out = dir + "/p" + eps + ".csv";
    ASSERT_EQ(Cli({"privatize", "--preset", "toy", "--model", kToyFlow, "--epsilon", eps,
                   "--out", out}).code, 0);
    const double d = MeanL2Distortion(data::ReadExportedCsv(out)->features,
                                      original->data.features);
    EXPECT_LT(d, previous) << eps;
    previous = d;
  }
}

TEST(CliTest, NoiseFreeClipOnlyWithHugeSensitivityIsIdentity) {
  const std::string dir = Scratch("priv_identity");
  const CliRun r = Cli({"privatize", "--preset", "toy", "--model", kToyFlow, "--epsilon", "1",
                     "--sensitivity", "1e9", "--clip-mode", "clip_only", "--no-noise", "--out",
                     dir + "/p.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  ExperimentConfig c = *PresetConfig("toy");
  auto original = LoadDataRef(c.data.train, c.data, Split::kTrain);
  auto priv = data::ReadExportedCsv(dir + "/p.csv");
  ASSERT_TRUE(original.ok() && priv.ok());
  double worst = 0.0;
  for (std::size_t i = 0; i < priv->size(); ++i) {
    for (std::size_t j = 0; j < priv->dim(); ++j) {
      worst = std::max(worst, std::abs(priv->features(i, j) - original->data.features(i, j)));
    }
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_EQ(priv->labels, original->data.labels);
}

TEST(CliTest, ZeroLatentWithRescaleAlwaysExitsFiveListingRows) {
  const std::string dir = Scratch("zero_latent");
  // A fresh flow is a permutation, so a zero row has a zero latent.
  flow::FlowConfig fc;
  fc.dim = 2;
  fc.cond_dim = 2;
  fc.blocks = {flow::CouplingKind::kGin};
  fc.hidden = {4};
  auto model = flow::FlowModel::Create(fc);
  ASSERT_TRUE(model.ok());
  ASSERT_TRUE(flow::SaveFlowCheckpoint(dir + "/f.json", *model, {}).ok());
  data::LabeledDataset d = Separable(6, 1);
  for (std::size_t i : {1, 4}) d.features(i, 0) = d.features(i, 1) = 0.0;
  ASSERT_TRUE(data::ExportCsv(d, dir + "/d.csv").ok());
  const CliRun r = Cli({"privatize", "--model", dir + "/f.json", "--data", dir + "/d.csv",
                     "--epsilon", "1", "--out", dir + "/p.csv"});
  EXPECT_EQ(r.code, 5);
  EXPECT_THAT(r.err, HasSubstr("1, 4"));
  EXPECT_FALSE(fs::exists(dir + "/p.csv"));
  EXPECT_EQ(Cli({"privatize", "--model", dir + "/f.json", "--data", dir + "/d.csv",
                 "--epsilon", "1", "--clip-mode", "clip_only", "--out", dir + "/p.csv"}).code,
            0);
}

TEST(CliTest, ClassifierTrainEvalAndReportRow) {
  const std::string dir = Scratch("classifier");
  ASSERT_TRUE(data::ExportCsv(Separable(200, 2), dir + "/train.csv").ok());
  ASSERT_TRUE(data::ExportCsv(Separable(100, 3), dir + "/test.csv").ok());
  const CliRun t = Cli({"train-classifier", "--preset", "toy", "--data", dir + "/train.csv",
                     "--out", dir + "/c.json", "--seed", "3"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_THAT(t.out, HasSubstr("train accuracy 1.0000"));
  EXPECT_EQ(Slurp(dir + "/c.curve.csv").substr(0, 10), "step,loss\n");

  const CliRun e = Cli({"eval", "--model", dir + "/c.json", "--data", dir + "/test.csv",
                     "--report", dir + "/report.csv"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(e.out, "accuracy 1.0000\n");
  auto rows = ReadReport(dir + "/report.csv");
  ASSERT_TRUE(rows.ok());
  ASSERT_EQ(rows->size(), 1u);
  EXPECT_EQ((*rows)[0].method, "original");
  EXPECT_EQ((*rows)[0].seed, 3u);
  EXPECT_EQ((*rows)[0].train_acc, 1.0);
  EXPECT_EQ((*rows)[0].test_acc, 1.0);

  // A second eval appends without a second header.
  ASSERT_EQ(Cli({"eval", "--model", dir + "/c.json", "--data", dir + "/test.csv", "--report",
                 dir + "/report.csv"}).code, 0);
  EXPECT_EQ(ReadReport(dir + "/report.csv")->size(), 2u);
}

TEST(CliTest, CadpClassifierReportRowIsFullyPopulated) {
  const std::string dir = Scratch("cadp_row");
  ASSERT_EQ(Cli({"privatize", "--preset", "toy", "--model", kToyFlow, "--epsilon", "1",
                 "--out", dir + "/p.csv"}).code, 0);
  ASSERT_EQ(Cli({"train-classifier", "--preset", "toy", "--data", dir + "/p.csv", "--out",
                 dir + "/c.json"}).code, 0);
  const CliRun e = Cli({"eval", "--preset", "toy", "--model", dir + "/c.json", "--report",
                     dir + "/r.csv"});
  ASSERT_EQ(e.code, 0) << e.err;
  const ReportRow row = (*ReadReport(dir + "/r.csv"))[0];
  EXPECT_EQ(row.method, "cadp");
  EXPECT_EQ(row.epsilon, 1.0);
  EXPECT_EQ(row.sensitivity, 1.0);
  ASSERT_TRUE(row.flow_nll.has_value());
  EXPECT_EQ(*row.flow_nll, flow::LoadFlowCheckpoint(kToyFlow)->metadata.final_nll);
  EXPECT_GT(row.train_acc, 0.5);
  EXPECT_GT(row.test_acc, 0.5);
  EXPECT_LE(row.test_acc, 1.0);
}

TEST(CliTest, EvalSchemaMismatchExitsSix) {
  const std::string dir = Scratch("schema");
  ASSERT_TRUE(data::ExportCsv(Separable(100, 2), dir + "/train.csv").ok());
  ASSERT_EQ(Cli({"train-classifier", "--preset", "toy", "--data", dir + "/train.csv", "--out",
                 dir + "/c.json"}).code, 0);
  const CliRun e = Cli({"eval", "--preset", "diabetes", "--model", dir + "/c.json"});
  EXPECT_EQ(e.code, 6);
  EXPECT_THAT(e.err, HasSubstr("schema"));
  EXPECT_EQ(Cli({"eval", "--model", dir + "/missing.json", "--data", dir + "/train.csv"}).code,
            3);
}

TEST(CliTest, DpSgdWithoutNoiseOrClipEqualsPlainTraining) {
  const std::string dir = Scratch("dpsgd");
  ASSERT_TRUE(data::ExportCsv(Separable(300, 4), dir + "/train.csv").ok());
  ASSERT_EQ(Cli({"train-classifier", "--preset", "toy", "--data", dir + "/train.csv", "--out",
                 dir + "/plain.json"}).code, 0);
  const CliRun dp = Cli({"train-classifier", "--preset", "toy", "--data", dir + "/train.csv",
                      "--dpsgd", "0", "inf", "1e-5", "--out", dir + "/dp.json"});
  ASSERT_EQ(dp.code, 0) << dp.err;
  EXPECT_THAT(dp.out, HasSubstr("warning"));
  auto plain = classifier::LoadClassifier(dir + "/plain.json");
  auto priv = classifier::LoadClassifier(dir + "/dp.json");
  ASSERT_TRUE(plain.ok() && priv.ok());
  const auto a = plain->model.parameters(), b = priv->model.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto va = a[i].values(), vb = b[i].values();
    EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin(), vb.end())) << i;
  }
  ASSERT_TRUE(priv->metadata.dpsgd.has_value());
  EXPECT_TRUE(std::isinf(priv->metadata.dpsgd->epsilon));
}

TEST(CliTest, DpSgdRecordsAccountantEpsilon) {
  const std::string dir = Scratch("dpsgd_eps");
  ASSERT_TRUE(data::ExportCsv(Separable(300, 5), dir + "/train.csv").ok());
  const CliRun r = Cli({"train-classifier", "--preset", "toy", "--data", dir + "/train.csv",
                     "--dpsgd", "4", "1", "1e-5", "--out", dir + "/dp.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ckpt = classifier::LoadClassifier(dir + "/dp.json");
  ASSERT_TRUE(ckpt.ok());
  ASSERT_TRUE(ckpt->metadata.dpsgd.has_value());
  const auto& rec = *ckpt->metadata.dpsgd;
  EXPECT_EQ(rec.noise_multiplier, 4.0);
  EXPECT_EQ(rec.clip_norm, 1.0);
  EXPECT_EQ(rec.lot_size, 64u);
  auto expect = dpsgd::SimpleAccountant(4.0, 64, 300, 300, 1e-5);
  EXPECT_EQ(rec.epsilon, expect->epsilon);
  EXPECT_EQ(ckpt->metadata.provenance.method, "dpsgd");
  EXPECT_EQ(Cli({"train-classifier", "--preset", "toy", "--data", dir + "/train.csv",
                 "--dpsgd", "-1", "1", "1e-5", "--out", dir + "/x.json"}).code, 2);
}

TEST(CliTest, DiagnoseModes) {
  const CliRun inv = Cli({"diagnose", "invertibility", "--preset", "toy", "--model", kToyFlow});
  EXPECT_EQ(inv.code, 0) << inv.err;
  EXPECT_THAT(inv.out, HasSubstr("result PASS"));
  const CliRun strict = Cli({"diagnose", "invertibility", "--preset", "toy", "--model", kToyFlow,
                          "--max-error", "0"});
  EXPECT_EQ(strict.code, 7);
  EXPECT_THAT(strict.out, HasSubstr("result FAIL"));

  const CliRun normal = Cli({"diagnose", "latent-normality", "--preset", "toy", "--model",
                          kToyFlow, "--samples", "0"});
  EXPECT_EQ(normal.code, 0) << normal.out;

  const CliRun ratio = Cli({"diagnose", "dp-ratio", "--epsilon", "1"});
  EXPECT_EQ(ratio.code, 0);
  EXPECT_THAT(ratio.out, HasSubstr("bound 1.1"));
  EXPECT_EQ(Cli({"diagnose", "dp-ratio", "--epsilon", "0"}).code, 2);
  // A "mechanism" whose ratio is far above its claimed budget fails.
  EXPECT_EQ(Cli({"diagnose", "dp-ratio", "--epsilon", "1", "--tolerance", "-0.9"}).code, 7);
  EXPECT_EQ(Cli({"diagnose", "sideways"}).code, 2);
}

TEST(SweepTest, GridOrderBaselineOncePerSeedAndBitwiseRerun) {
  const std::string a = Scratch("sweep_a"), b = Scratch("sweep_b");
  const ExperimentConfig c = TinyToy();
  std::ostringstream log;
  SweepOptions options;
  options.out_dir = a;
  auto r = RunSweep(c, options, log);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_TRUE(r->failures.empty());
  std::vector<std::string> order;
  for (const ReportRow& row : r->rows) {
    order.push_back(absl::StrCat(row.seed, ":", row.method, ":",
                                 row.epsilon ? FormatNumber(*row.epsilon) : "-"));
    EXPECT_GE(row.test_acc, 0.0);
    EXPECT_LE(row.test_acc, 1.0);
    EXPECT_EQ(row.wallclock_s, 0.0);
  }
  EXPECT_EQ(order, (std::vector<std::string>{
                       "0:original:-", "0:cadp:0.5", "0:dpsgd:0.5", "0:cadp:5", "0:dpsgd:5",
                       "1:original:-", "1:cadp:0.5", "1:dpsgd:0.5", "1:cadp:5", "1:dpsgd:5"}));
  EXPECT_TRUE(fs::exists(a + "/flow_seed0.json"));
  EXPECT_TRUE(fs::exists(a + "/flow_seed1.json"));
  EXPECT_FALSE(fs::exists(a + "/failures.csv"));

  options.out_dir = b;
  ASSERT_TRUE(RunSweep(c, options, log).ok());
  EXPECT_EQ(Slurp(a + "/report.csv"), Slurp(b + "/report.csv"));
  EXPECT_EQ(Slurp(a + "/distortion.csv"), Slurp(b + "/distortion.csv"));
}

TEST(SweepTest, FailingCellIsRecordedAndTheSweepContinues) {
  const std::string dir = Scratch("sweep_fail");
  ExperimentConfig c = TinyToy();
  c.seeds = {0};
  // No noise multiplier reaches this budget: DP-SGD cells fail, CADP runs.
  c.privacy.epsilons = {1e-9, 1.0};
  std::ostringstream out;
  SweepOptions options;
  options.out_dir = dir;
  const absl::Status s = CmdSweep(c, options, out);
  EXPECT_FALSE(s.ok());
  EXPECT_NE(ExitCodeOf(s), 0);
  auto rows = ReadReport(dir + "/report.csv");
  ASSERT_TRUE(rows.ok());
  std::vector<std::string> methods;
  for (const ReportRow& r : *rows) methods.push_back(r.method);
  EXPECT_EQ(methods, (std::vector<std::string>{"original", "cadp", "cadp", "dpsgd"}));
  const std::string failures = Slurp(dir + "/failures.csv");
  EXPECT_THAT(failures, HasSubstr("1e-09,dpsgd,0,"));
  EXPECT_THAT(out.str(), HasSubstr("mean_test_acc"));
}

TEST(SweepTest, CliSweepSucceedsOnTinyConfig) {
  const std::string dir = Scratch("sweep_cli");
  const std::string cfg = WriteFile(dir + "/t.cfg",
                                    "[experiment]\npreset = toy\nseeds = 3\n"
                                    "[data]\nsynthetic_train = 300\nsynthetic_test = 100\n"
                                    "[flow]\nsteps = 40\neval_every = 20\n"
                                    "[classifier]\nsteps = 20\n"
                                    "[privacy]\nepsilons = 1\n");
  const CliRun r = Cli({"sweep", "--config", cfg, "--out", dir + "/out"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadReport(dir + "/out/report.csv")->size(), 3u);
  EXPECT_EQ(Cli({"sweep", "--config", cfg, "--set", "privacy.epsilons=0", "--out",
                 dir + "/bad"}).code, 2);
}

}  // namespace
}  // namespace cadp::cli
