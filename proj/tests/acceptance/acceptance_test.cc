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

// Acceptance gate: criteria 1 to 11, one PASS/FAIL line each. Exit status is
// non-zero when any criterion fails.
//
//   acceptance_test --mnist DIR --work DIR [--only 1,2,7]

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "cadp/base/rng.h"
#include "cadp/classifier/classifier.h"
#include "cadp/cli/commands.h"
#include "cadp/cli/config.h"
#include "cadp/cli/data_ref.h"
#include "cadp/cli/pipeline.h"
#include "cadp/cli/report.h"
#include "cadp/cli/sweep.h"
#include "cadp/data/synthetic.h"
#include "cadp/data/wasserstein.h"
#include "cadp/flow/flow.h"
#include "cadp/numerics/gradcheck.h"
#include "cadp/numerics/ops.h"
#include "cadp/privacy/mechanism.h"

namespace cadp {
namespace {

namespace fs = std::filesystem;
using cli::ExperimentConfig;
using flow::CouplingKind;
using flow::FlowConfig;
using flow::FlowModel;
using numerics::Matrix;
using numerics::Tensor;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Fail(std::string detail) { return {false, std::move(detail)}; }



FlowConfig SmallFlow(std::size_t dim, std::size_t cond, std::vector<CouplingKind> blocks,
                     uint64_t seed) {
  FlowConfig c;
  c.dim = dim;
  c.cond_dim = cond;
  c.blocks = std::move(blocks);
  c.hidden = {16, 16};
  c.activation = numerics::Activation::kTanh;
  c.seed = seed;
  return c;
}

// Every parameter, the zero-initialized output layers included.
void Randomize(FlowModel& model, uint64_t seed, double scale) {
  Rng rng(seed);
  for (Tensor& p : model.parameters()) {
    for (double& v : p.mutable_values()) v = scale * (2 * rng.Uniform() - 1);
  }
}

Matrix Gaussian(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.mutable_values()) v = scale * rng.Normal();
  return m;
}

Matrix OneHot(std::size_t rows, std::size_t classes, Rng& rng) {
  Matrix m(rows, classes);
  for (std::size_t r = 0; r < rows; ++r) m(r, rng.UniformIndex(classes)) = 1.0;
  return m;
}

// log|det dz/dx| of one row by central differences of the encoder.
double NumericLogDet(const FlowModel& model, const Matrix& x, const Matrix& c, double h) {
  const std::size_t d = x.cols();
  Eigen::MatrixXd j(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    Matrix plus = x, minus = x;
    plus(0, k) += h;
    minus(0, k) -= h;
    const Matrix zp = model.Encode(plus, c), zm = model.Encode(minus, c);
    for (std::size_t i = 0; i < d; ++i) j(i, k) = (zp(0, i) - zm(0, i)) / (2 * h);
  }
  return std::log(std::abs(j.determinant()));
}

ExperimentConfig ToyConfig() {
  ExperimentConfig c = *cli::PresetConfig("toy");
  c.seeds = {0};
  return c;
}

absl::StatusOr<std::pair<data::LabeledDataset, data::LabeledDataset>> Splits(
    const ExperimentConfig& c) {
  auto train = cli::LoadDataRef(c.data.train, c.data, cli::Split::kTrain);
  if (!train.ok()) return train.status();
  auto test = cli::LoadTestSplit(c.data.test, c.data);
  if (!test.ok()) return test.status();
  return std::make_pair(std::move(train->data), std::move(test->data));
}

bool SameBytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

std::string Num(double v) { return absl::StrFormat("%.4g", v); }



// 1. An 8-block GIN trained on two-gaussians inverts held-out samples.
Outcome Invertibility() {
  ExperimentConfig c = ToyConfig();
  c.flow.blocks = 8;
  auto splits = Splits(c);
  if (!splits.ok()) return Fail(std::string(splits.status().message()));
  auto trained = cli::TrainFlowOn(c, splits->first, 0);
  if (!trained.ok()) return Fail(std::string(trained.status().message()));
  std::vector<std::size_t> rows(100);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const data::LabeledDataset held = data::SelectRows(splits->second, rows);
  auto in = data::MakeFlowInputs(held, {});
  const double err = cli::MaxRoundTripError(trained->model, in->x, in->conditions);
  return {err < 1e-6, absl::StrCat("max |f^-1(f(x)) - x|_inf = ", Num(err), " over 100 held-out "
                                   "samples (limit 1e-6); trained NLL ",
                                   Num(trained->result.best_heldout_nll))};
}

// 2. All-GIN logdet is zero at random parameters; the centred log-scales of
// every block sum to zero per sample, checked here from the block outputs.
Outcome VolumePreservation() {
  auto model = FlowModel::Create(SmallFlow(6, 2, std::vector(6, CouplingKind::kGin), 21));
  if (!model.ok()) return Fail(std::string(model.status().message()));
  Randomize(*model, 22, 1.5);
  Rng rng(23);
  const Matrix x = Gaussian(100, 6, rng, 2.0), c = OneHot(100, 2, rng);
  numerics::NoGradGuard guard;
  const flow::FlowForward f = model->Forward(Tensor::FromMatrix(x), Tensor::FromMatrix(c));
  double worst_logdet = 0.0, worst_block_sum = 0.0, largest_scale = 0.0;
  for (double v : f.logdet.values()) worst_logdet = std::max(worst_logdet, std::abs(v));
  Tensor h = Tensor::FromMatrix(x);
  const Tensor ct = Tensor::FromMatrix(c);
  for (const flow::CouplingBlock& b : model->blocks()) {
    const flow::BlockOutput out = b.Forward(h, ct);
    const Matrix s = out.log_scale.ToMatrix();
    for (std::size_t r = 0; r < s.rows(); ++r) {
      double sum = 0.0;
      for (std::size_t j = 0; j < s.cols(); ++j) {
        sum += s(r, j);
        largest_scale = std::max(largest_scale, std::abs(s(r, j)));
      }
      worst_block_sum = std::max(worst_block_sum, std::abs(sum));
    }
    h = out.y;
  }
  const bool pass = worst_logdet <= 1e-12 && worst_block_sum <= 1e-12 && largest_scale > 0.1;
  return {pass, absl::StrCat("max |logdet| = ", Num(worst_logdet),
                             ", max |sum of centred log-scales| per block = ",
                             Num(worst_block_sum), " (limit 1e-12; largest |s| ",
                             Num(largest_scale), ")")};
}

// 3. Flow NLL and classifier loss gradients against central differences.
Outcome GradientCorrectness() {
  double worst = 0.0;
  std::vector<std::string> parts;
  for (CouplingKind kind : {CouplingKind::kGin, CouplingKind::kAffineGlow}) {
    auto model = FlowModel::Create(SmallFlow(8, 2, std::vector(3, kind), 31));
    if (!model.ok()) return Fail(std::string(model.status().message()));
    Randomize(*model, 32, 0.5);
    Rng rng(33);
    const Tensor x = Tensor::FromMatrix(Gaussian(6, 8, rng));
    const Tensor c = Tensor::FromMatrix(OneHot(6, 2, rng));
    auto params = model->parameters();
    const double err = numerics::FiniteDiffCheck(
        [&] { return numerics::Negate(numerics::Mean(model->LogLikelihood(x, c))); }, params,
        1e-5);
    worst = std::max(worst, err);
    parts.push_back(absl::StrCat(flow::CouplingKindName(kind), " NLL ", Num(err)));
  }
  classifier::ClassifierConfig cc;
  cc.depth = 3;
  cc.width = 8;
  cc.activation = numerics::Activation::kTanh;
  std::vector<data::Feature> schema;
  for (int i = 0; i < 8; ++i) schema.push_back({absl::StrCat("f", i)});
  auto clf = classifier::ClassifierModel::Create(cc, schema, 3);
  Rng rng(34);
  const Tensor x = Tensor::FromMatrix(Gaussian(5, 8, rng));
  const std::vector<int> labels = {0, 2, 1, 1, 0};
  auto params = clf.parameters();
  const double err = numerics::FiniteDiffCheck(
      [&] { return numerics::SoftmaxCrossEntropy(clf.Logits(x), labels); }, params, 1e-5);
  worst = std::max(worst, err);
  parts.push_back(absl::StrCat("classifier CE ", Num(err)));
  return {worst < 1e-3,
          absl::StrCat("max relative error ", Num(worst), " (limit 1e-3; ",
                       absl::StrJoin(parts, ", "), ")")};
}

// 4. log_likelihood = log N(z; 0, I) + log|det J| with J by differences.
Outcome LikelihoodCorrectness() {
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t dim : {2u, 5u, 8u}) {
    for (bool glow : {true, false}) {
      std::vector<CouplingKind> blocks =
          glow ? std::vector{CouplingKind::kAffineGlow, CouplingKind::kGin,
                             CouplingKind::kAffineGlow}
               : std::vector(3, CouplingKind::kGin);
      FlowConfig config = SmallFlow(dim, 3, blocks, 40 + dim);
      if (!glow) config.input_scale = 0.5;
      auto model = FlowModel::Create(config);
      if (!model.ok()) return Fail(std::string(model.status().message()));
      Randomize(*model, 41 + dim, 0.6);
      Rng rng(42 + dim);
      for (int trial = 0; trial < 5; ++trial) {
        const Matrix x = Gaussian(1, dim, rng), c = OneHot(1, 3, rng);
        const Matrix z = model->Encode(x, c);
        double log_q = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
          log_q += -0.5 * std::log(2 * std::numbers::pi) - 0.5 * z(0, j) * z(0, j);
        }
        const double oracle = log_q + NumericLogDet(*model, x, c, 1e-5);
        worst = std::max(worst, std::abs(model->LogLikelihoodValues(x, c)[0] - oracle));
        ++checked;
      }
    }
  }
  return {worst < 1e-5, absl::StrCat("max |log p - (log q(z) + log|det J_fd|)| = ", Num(worst),
                                     " over ", checked, " points, d in {2, 5, 8} (limit 1e-5)")};
}

// 5. The scalar Laplace mechanism's empirical privacy loss.
Outcome LaplaceBound() {
  bool pass = true;
  std::vector<std::string> parts;
  for (double eps : {0.2, 1.0, 10.0}) {
    auto r = privacy::EmpiricalDpRatio(
        [eps](double x, Rng& rng) { return privacy::LaplaceMechanism(x, 1.0, eps, rng); }, 0.0,
        1.0, 1000000, 100, 51);
    if (!r.ok()) return Fail(std::string(r.status().message()));
    pass = pass && r->max_log_ratio <= eps + 0.1;
    parts.push_back(absl::StrCat("eps ", Num(eps), ": ", Num(r->max_log_ratio), " (",
                                 r->bins_used, " bins)"));
  }
  return {pass, absl::StrCat("max log-ratio vs eps + 0.1, 1e6 trials: ",
                             absl::StrJoin(parts, "; "))};
}

// 6. L1 clipping contract on random latents.
Outcome ClippingContract() {
  Rng rng(61);
  double worst_rescale = 0.0;
  std::size_t grew = 0, changed_below = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t d = 1 + rng.UniformIndex(16);
    const double s = 0.1 + 5 * rng.Uniform();
    std::vector<double> z(d);
    for (double& v : z) v = rng.Normal() * std::exp(2 * rng.Normal());
    auto l1 = [](const std::vector<double>& v) {
      double a = 0;
      for (double x : v) a += std::abs(x);
      return a;
    };
    std::vector<double> r = z;
    if (!privacy::ClipL1(r, s, privacy::ClipMode::kRescaleAlways).ok()) return Fail("rescale failed");
    worst_rescale = std::max(worst_rescale, std::abs(l1(r) - s));
    std::vector<double> k = z;
    if (!privacy::ClipL1(k, s, privacy::ClipMode::kClipOnly).ok()) return Fail("clip failed");
    if (l1(k) > l1(z) * (1 + 1e-15)) ++grew;
    if (l1(z) <= s && k != z) ++changed_below;
  }
  const bool pass = worst_rescale <= 1e-9 && grew == 0 && changed_below == 0;
  return {pass, absl::StrCat("RESCALE_ALWAYS max ||z||_1 - s| = ", Num(worst_rescale),
                             " (limit 1e-9); CLIP_ONLY norm increases ", grew,
                             ", changes below s ", changed_below, " over 1e4 latents")};
}

// 7. Held-out NLL on two-gaussians against the analytic conditional optimum.
Outcome FlowConvergence(const std::string& dir) {
  ExperimentConfig c = ToyConfig();
  auto splits = Splits(c);
  if (!splits.ok()) return Fail(std::string(splits.status().message()));
  auto trained = cli::TrainFlowOn(c, splits->first, 0);
  if (!trained.ok()) return Fail(std::string(trained.status().message()));
  const data::LabeledDataset& test = splits->second;
  auto in = data::MakeFlowInputs(test, {});
  const double nll = flow::MeanNll(trained->model, in->x, in->conditions);
  // The true class-conditional density on the same held-out points.
  const Matrix raw = data::Denormalize(test);
  double oracle = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double dx = raw(i, 0) - (test.labels[i] == 0 ? -2.0 : 2.0), dy = raw(i, 1);
    oracle += std::log(2 * std::numbers::pi) + 0.5 * (dx * dx + dy * dy);
  }
  oracle /= static_cast<double>(test.size());
  // The flow sees standardized features; its density is in those units.
  double log_scale = 0.0;
  for (const data::FeatureNormalization& n : test.normalization) log_scale += std::log(n.scale);
  const double nll_raw = nll + log_scale;
  const double gap = std::abs(nll_raw - data::kTwoGaussiansClassEntropy);
  const std::string csv = absl::StrCat("metric,value\nheldout_nll,", cli::FormatNumber(nll_raw),
                                       "\noracle_nll,", cli::FormatNumber(oracle),
                                       "\nanalytic_entropy,",
                                       cli::FormatNumber(data::kTwoGaussiansClassEntropy), "\n");
  if (!cli::WriteTextFile(dir + "/criterion7.csv", csv).ok()) return Fail("cannot write csv");
  return {gap < 0.3, absl::StrCat("held-out NLL ", Num(nll_raw), " nats vs analytic ",
                                  Num(data::kTwoGaussiansClassEntropy), " (gap ", Num(gap),
                                  ", limit 0.3); true density on the same points ",
                                  Num(oracle))};
}

// 8. Categorical mixture: marginals of the CADP copy against the sampling
// floor, and the conditioned binary feature kept exactly.
Outcome CategoricalProtocol(const std::string& dir) {
  ExperimentConfig c = *cli::PresetConfig("diabetes");
  auto train = cli::LoadDataRef(c.data.train, c.data, cli::Split::kTrain);
  if (!train.ok()) return Fail(std::string(train.status().message()));
  const data::LabeledDataset& original = train->data;
  auto trained = cli::TrainFlowOn(c, original, 0);
  if (!trained.ok()) return Fail(std::string(trained.status().message()));
  const double eps = 1.0, s = cli::SensitivityFor(c.privacy, eps);
  auto priv = cli::PrivatizeWith(trained->model, cli::ConditionFromConfig(c.data), c.privacy,
                                 original, {eps, s, cli::PrivatizeSeed(0, eps), true});
  if (!priv.ok()) return Fail(std::string(priv.status().message()));

  // Sampling floor: W1 between independent same-size draws of the generator,
  // averaged over several pairs.
  constexpr int kPairs = 5;
  std::vector<data::LabeledDataset> draws;
  for (int k = 0; k < 2 * kPairs; ++k) {
    auto d = data::MakeSynthetic(data::SyntheticKind::kCategoricalMixture, original.size(),
                                 1000 + k);
    if (!d.ok()) return Fail(std::string(d.status().message()));
    draws.push_back(*std::move(d));
  }
  const auto sex = data::FeatureIndex(original, c.data.condition);
  if (!sex) return Fail("no conditioned feature");
  bool exact = true;
  for (std::size_t i = 0; i < original.size(); ++i) {
    exact = exact && priv->data.features(i, *sex) == original.features(i, *sex);
  }
  bool pass = exact;
  double worst_ratio = 0.0;
  std::string worst_feature;
  std::string csv = "feature,w1,floor,ratio\n";
  for (const data::Feature& f : original.schema) {
    if (f.name == c.data.condition) continue;
    auto w = data::MarginalDistance(priv->data, original, f.name);
    if (!w.ok()) return Fail(std::string(w.status().message()));
    double floor = 0.0;
    for (int k = 0; k < kPairs; ++k) {
      floor += *data::MarginalDistance(draws[2 * k], draws[2 * k + 1], f.name) / kPairs;
    }
    const double ratio = *w / floor;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_feature = f.name;
    }
    pass = pass && ratio < 5.0;
    absl::StrAppend(&csv, f.name, ",", cli::FormatNumber(*w), ",", cli::FormatNumber(floor), ",",
                    cli::FormatNumber(ratio), "\n");
  }
  if (!cli::WriteTextFile(dir + "/criterion8.csv", csv).ok()) return Fail("cannot write csv");
  return {pass, absl::StrCat("worst W1 / floor = ", Num(worst_ratio), " (", worst_feature,
                             ", limit 5) over ", original.schema.size() - 1,
                             " features at eps 1, s ", Num(s), "; conditioned feature '",
                             c.data.condition, "' ", exact ? "identical" : "CHANGED",
                             "; flow NLL ", Num(trained->result.best_heldout_nll))};
}

ExperimentConfig MnistConfig(const std::string& mnist_dir) {
  ExperimentConfig c = *cli::PresetConfig("mnist");
  c.data.train = mnist_dir;
  c.data.test = mnist_dir;
  c.privacy.epsilons = {0.2, 1.0, 2.0, 10.0};
  c.seeds = {0, 1, 2};
  return c;
}

struct MnistRun {
  absl::Status status = absl::OkStatus();
  cli::SweepResult result;
};

// `full`: the whole grid; otherwise seed 0's CADP cells only (criterion 10
// on its own).
MnistRun RunMnist(const std::string& mnist_dir, const std::string& dir, bool full) {
  MnistRun run;
  if (mnist_dir.empty() || !fs::exists(mnist_dir + "/train-images-idx3-ubyte")) {
    run.status = absl::NotFoundError(
        "MNIST subset not found at '" + mnist_dir +
        "' (scripts/make_mnist_subset.py writes it; needs the mlxtend package)");
    return run;
  }
  cli::SweepOptions options;
  options.out_dir = dir + "/mnist";
  std::ostringstream log;
  ExperimentConfig config = MnistConfig(mnist_dir);
  if (!full) {
    config.seeds = {0};
    options.run_original = false;
    options.run_dpsgd = false;
  }
  auto r = cli::RunSweep(config, options, log);
  if (!r.ok()) {
    run.status = r.status();
  } else {
    run.result = *std::move(r);
  }
  return run;
}

// 9. Privacy-utility ordering on the MNIST subset.
Outcome PrivacyUtility(const MnistRun& run) {
  if (!run.status.ok()) return Fail(std::string(run.status.message()));
  if (!run.result.failures.empty()) {
    const cli::SweepFailure& f = run.result.failures.front();
    return Fail(absl::StrCat(run.result.failures.size(), " sweep cells failed, first ",
                             f.method, " seed ", f.seed, ": ", f.message));
  }
  std::map<std::pair<std::string, double>, std::vector<double>> acc;
  for (const cli::ReportRow& r : run.result.rows) {
    acc[{r.method, r.epsilon.value_or(-1.0)}].push_back(r.test_acc);
  }
  auto mean = [&](const std::string& m, double e) {
    const auto& v = acc[{m, e}];
    double s = 0;
    for (double a : v) s += a;
    return v.empty() ? NAN : s / static_cast<double>(v.size());
  };
  const std::vector<double> grid = {0.2, 1.0, 2.0, 10.0};
  const double original = mean("original", -1.0);
  bool a = true;
  std::vector<std::string> cadp_text;
  std::vector<double> cadp;
  for (double e : grid) {
    cadp.push_back(mean("cadp", e));
    a = a && original >= cadp.back();
    cadp_text.push_back(absl::StrFormat("%.4f", cadp.back()));
  }
  int inversions = 0;
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < cadp.size(); ++i) {
    if (cadp[i] < cadp[i - 1]) {
      ++inversions;
      worst_drop = std::max(worst_drop, cadp[i - 1] - cadp[i]);
    }
  }
  const bool b = inversions == 0 || (inversions == 1 && worst_drop <= 0.02);
  const double dp02 = mean("dpsgd", 0.2);
  const bool c = mean("cadp", 0.2) >= dp02;
  return {a && b && c,
          absl::StrFormat("(a) original %.4f >= CADP [%s] over eps {0.2,1,2,10}: %s; (b) "
                          "%d inversion(s), largest drop %.4f: %s; (c) eps 0.2 CADP %.4f vs "
                          "DP-SGD %.4f: %s (means over 3 seeds)",
                          original, absl::StrJoin(cadp_text, ", "), a ? "yes" : "NO",
                          inversions, worst_drop, b ? "yes" : "NO", cadp[0], dp02,
                          c ? "yes" : "NO")};
}

// 10. Mean L2 distortion of privatized images falls strictly with eps.
Outcome DistortionMonotone(const MnistRun& run) {
  if (!run.status.ok()) return Fail(std::string(run.status.message()));
  std::vector<std::pair<double, double>> seed0;
  for (const cli::DistortionRow& d : run.result.distortion) {
    if (d.seed == 0) seed0.emplace_back(d.epsilon, d.mean_l2);
  }
  std::sort(seed0.begin(), seed0.end());
  if (seed0.size() != 4) return Fail(absl::StrCat("expected 4 distortions, got ", seed0.size()));
  bool strict = true;
  std::vector<std::string> text;
  for (std::size_t i = 0; i < seed0.size(); ++i) {
    if (i > 0) strict = strict && seed0[i].second < seed0[i - 1].second;
    text.push_back(absl::StrFormat("eps %s: %.6g", Num(seed0[i].first), seed0[i].second));
  }
  return {strict, absl::StrCat("seed 0 mean per-image L2 distortion ",
                               absl::StrJoin(text, ", "), strict ? " (strictly decreasing)"
                                                                 : " (NOT strictly decreasing)")};
}

}  // namespace
}  // namespace cadp

int main(int argc, char** argv) {
  using namespace cadp;
  CLI::App app{"Acceptance criteria 1-11"};
  std::string mnist_dir, work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--mnist", mnist_dir, "MNIST subset IDX directory");
  app.add_option("--work", work, "Scratch directory for reports");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](int k) { return selected.empty() || selected.contains(k); };

  const std::string run1 = work + "/run1", run2 = work + "/run2";
  fs::remove_all(work);
  fs::create_directories(run1);
  fs::create_directories(run2);

  int failed = 0;
  auto report = [&](int k, const char* name, double limit_s, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = f();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) {
      o.pass = false;
      o.detail += absl::StrFormat("; runtime %.1f s exceeds %.0f s", secs, limit_s);
    }
    failed += !o.pass;
    std::cout << absl::StrFormat("[%s] criterion %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL",
                                 k, name, o.detail, secs)
              << std::flush;
  };

  if (wanted(1)) report(1, "invertibility", 60, Invertibility);
  if (wanted(2)) report(2, "volume preservation", 10, VolumePreservation);
  if (wanted(3)) report(3, "gradient correctness", 60, GradientCorrectness);
  if (wanted(4)) report(4, "likelihood correctness", 60, LikelihoodCorrectness);
  if (wanted(5)) report(5, "Laplace epsilon bound", 60, LaplaceBound);
  if (wanted(6)) report(6, "clipping contract", 10, ClippingContract);
  if (wanted(7)) report(7, "flow convergence", 300, [&] { return FlowConvergence(run1); });
  if (wanted(8)) report(8, "categorical protocol", 300, [&] { return CategoricalProtocol(run1); });

  MnistRun mnist;
  bool mnist_ran = false;
  if (wanted(9)) {
    report(9, "privacy-utility ordering", 1800, [&] {
      mnist = RunMnist(mnist_dir, run1, true);
      mnist_ran = true;
      return PrivacyUtility(mnist);
    });
  }
  if (wanted(10)) {
    report(10, "distortion monotonicity", 300, [&] {
      if (!mnist_ran) {
        mnist = RunMnist(mnist_dir, run1, false);
        mnist_ran = true;
      }
      return DistortionMonotone(mnist);
    });
  }
  if (wanted(11)) {
    report(11, "determinism", 0, [&] {
      std::vector<std::string> files;
      std::vector<std::string> problems;
      if (wanted(7)) {
        FlowConvergence(run2);
        files.push_back("criterion7.csv");
      }
      if (wanted(8)) {
        CategoricalProtocol(run2);
        files.push_back("criterion8.csv");
      }
      if (wanted(9) || wanted(10)) {
        const MnistRun again = RunMnist(mnist_dir, run2, wanted(9));
        if (!again.status.ok()) problems.push_back(std::string(again.status.message()));
        files.push_back("mnist/report.csv");
        files.push_back("mnist/distortion.csv");
      }
      std::size_t same = 0;
      for (const std::string& f : files) {
        if (SameBytes(run1 + "/" + f, run2 + "/" + f)) {
          ++same;
        } else {
          problems.push_back(f + " differs or is missing");
        }
      }
      return Outcome{problems.empty() && !files.empty(),
                     absl::StrCat(same, "/", files.size(), " report CSVs identical on re-run (",
                                  absl::StrJoin(files, ", "), ")",
                                  problems.empty() ? "" : "; " + absl::StrJoin(problems, "; "))};
    });
  }
  std::cout << (failed == 0 ? "all selected criteria passed\n"
                            : absl::StrCat(failed, " criteria failed\n"));
  return failed == 0 ? 0 : 1;
}
