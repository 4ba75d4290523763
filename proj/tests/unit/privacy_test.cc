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
#include <numeric>
#include <vector>

#include "cadp/base/rng.h"
#include "cadp/data/synthetic.h"
#include "cadp/flow/flow.h"
#include "cadp/privacy/laplace.h"
#include "cadp/privacy/mechanism.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace cadp::privacy {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using numerics::Matrix;

double L1(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += std::abs(x);
  return s;
}

TEST(ClipTest, SpecExamples) {
  for (auto mode : {ClipMode::kRescaleAlways, ClipMode::kClipOnly}) {
    std::vector<double> z = {3, -1};
    ASSERT_TRUE(ClipL1(z, 1.0, mode).ok());
    EXPECT_THAT(z, ElementsAre(DoubleNear(0.75, 1e-15), DoubleNear(-0.25, 1e-15)));
  }
  std::vector<double> a = {0.5, 0}, b = {0.5, 0};
  ASSERT_TRUE(ClipL1(a, 1.0, ClipMode::kRescaleAlways).ok());
  ASSERT_TRUE(ClipL1(b, 1.0, ClipMode::kClipOnly).ok());
  EXPECT_THAT(a, ElementsAre(1.0, 0.0));
  EXPECT_THAT(b, ElementsAre(0.5, 0.0));
}

TEST(ClipTest, ZeroAndInvalidTargets) {
  std::vector<double> zero = {0, 0, 0};
  EXPECT_FALSE(ClipL1(zero, 1.0, ClipMode::kRescaleAlways).ok());
  EXPECT_TRUE(ClipL1(zero, 1.0, ClipMode::kClipOnly).ok());
  EXPECT_THAT(zero, ElementsAre(0, 0, 0));
  std::vector<double> z = {1, 2};
  EXPECT_FALSE(ClipL1(z, 0.0, ClipMode::kClipOnly).ok());
}

TEST(ClipTest, NormProperties) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> z(1 + rng.UniformIndex(20));
    for (double& v : z) v = rng.Normal() * std::exp(3 * rng.Normal());
    const std::vector<double> orig = z;
    std::vector<double> rescaled = z;
    ASSERT_TRUE(ClipL1(rescaled, 2.0, ClipMode::kRescaleAlways).ok());
    EXPECT_NEAR(L1(rescaled), 2.0, 1e-9);
    ASSERT_TRUE(ClipL1(z, 2.0, ClipMode::kClipOnly).ok());
    EXPECT_LE(L1(z), std::max(2.0 + 1e-9, 0.0));
    EXPECT_LE(L1(z), L1(orig) + 1e-12);
    if (L1(orig) <= 2.0) EXPECT_EQ(z, orig);
  }
}

TEST(LaplaceTest, InverseCdfEdgeCases) {
  EXPECT_EQ(LaplaceInverseCdf(0.5, 3.0), 0.0);
  // Median split and symmetry.
  EXPECT_DOUBLE_EQ(LaplaceInverseCdf(0.75, 1.0), std::log(2.0));
  EXPECT_DOUBLE_EQ(LaplaceInverseCdf(0.25, 1.0), -std::log(2.0));
  for (double u : {0.01, 0.3, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(LaplaceCdf(LaplaceInverseCdf(u, 0.7), 0.7), u, 1e-12);
  }
  EXPECT_THROW(LaplaceSampler(0.0, Rng(1)), std::invalid_argument);
}

TEST(LaplaceTest, ScaleFromPrivacyParams) {
  PrivacyParams p{.epsilon = 1.0, .sensitivity = 1.0};
  EXPECT_EQ(p.noise_scale(), 1.0);
  EXPECT_EQ(p.reported_epsilon(), 1.0);
  p.strict_accounting = true;
  EXPECT_EQ(p.reported_epsilon(), 2.0);
  EXPECT_FALSE((PrivacyParams{.epsilon = 0.0}).Validate().ok());
  EXPECT_FALSE((PrivacyParams{.sensitivity = -1.0}).Validate().ok());
}

TEST(LaplaceTest, Moments) {
  LaplaceSampler sampler(0.5, Rng(42));
  const auto v = LaplaceNoise(sampler, 1000000);
  double mean = 0, sq = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (double x : v) sq += (x - mean) * (x - mean);
  EXPECT_LT(std::abs(mean), 0.005);
  EXPECT_LT(std::abs(sq / v.size() - 0.5), 0.01);
}

TEST(LaplaceTest, KolmogorovSmirnovAgainstAnalyticCdf) {
  LaplaceSampler sampler(1.3, Rng(7));
  const auto v = LaplaceNoise(sampler, 100000);
  const double d = KolmogorovSmirnovStatistic(v, [](double x) { return LaplaceCdf(x, 1.3); });
  EXPECT_LT(d, KolmogorovSmirnovCritical01(v.size()));
  // Negative control: the wrong scale is rejected.
  const double wrong = KolmogorovSmirnovStatistic(v, [](double x) { return LaplaceCdf(x, 1.0); });
  EXPECT_GT(wrong, KolmogorovSmirnovCritical01(v.size()));
}

TEST(LaplaceTest, SeededDeterminism) {
  LaplaceSampler a(1.0, Rng(9)), b(1.0, Rng(9));
  EXPECT_EQ(LaplaceNoise(a, 100), LaplaceNoise(b, 100));
}

TEST(SensitivityRuleTest, Rules) {
  EXPECT_EQ(ApplySensitivityRule(SensitivityRule::kHalfEpsilon, 0.2, 0), 0.1);
  EXPECT_EQ(ApplySensitivityRule(SensitivityRule::kHalfEpsilonCapped, 1.0, 0), 0.5);
  EXPECT_EQ(ApplySensitivityRule(SensitivityRule::kHalfEpsilonCapped, 10.0, 0), 4.0);
  EXPECT_EQ(ApplySensitivityRule(SensitivityRule::kFixed, 10.0, 1.5), 1.5);
  EXPECT_FALSE(ParseSensitivityRule("double").ok());
  EXPECT_FALSE(ParseClipMode("none").ok());
}

double Laplace1(double x, Rng& rng, double eps) { return LaplaceMechanism(x, 1.0, eps, rng); }

TEST(DpRatioTest, LaplaceMechanismStaysWithinEpsilon) {
  std::vector<double> observed;
  for (double eps : {0.2, 1.0, 10.0}) {
    auto r = EmpiricalDpRatio([eps](double x, Rng& rng) { return Laplace1(x, rng, eps); },
                              0.0, 1.0, 1000000, 100, 11);
    ASSERT_TRUE(r.ok());
    EXPECT_LE(r->max_log_ratio, eps + 0.1) << "eps " << eps;
    // At eps = 10 the two output laws barely overlap, so few bins qualify.
    EXPECT_GE(r->bins_used, 5u);
    observed.push_back(r->max_log_ratio);
  }
  EXPECT_LT(observed[0], observed[1]);
  EXPECT_LT(observed[1], observed[2]);
  // The bound is nearly attained at eps = 1 (tails have ratio exactly e).
  EXPECT_GT(observed[1], 0.9);
}

TEST(DpRatioTest, IdenticalInputsGiveNearZero) {
  auto r = EmpiricalDpRatio([](double x, Rng& rng) { return Laplace1(x, rng, 1.0); },
                            0.5, 0.5, 1000000, 100, 12);
  ASSERT_TRUE(r.ok());
  EXPECT_LT(r->max_log_ratio, 0.05);
}

TEST(DpRatioTest, BrokenMechanismIsDetected) {
  // Noise too small for the claimed epsilon.
  auto r = EmpiricalDpRatio([](double x, Rng& rng) { return LaplaceMechanism(x, 0.25, 1.0, rng); },
                            0.0, 1.0, 1000000, 100, 13);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(r->max_log_ratio, 1.1);
}

flow::FlowModel RandomGin(std::size_t dim, std::size_t cond, uint64_t seed) {
  flow::FlowConfig c;
  c.dim = dim;
  c.cond_dim = cond;
  c.blocks = std::vector(4, flow::CouplingKind::kGin);
  c.hidden = {16};
  c.seed = seed;
  auto model = flow::FlowModel::Create(c);
  Rng rng(seed);
  for (auto& p : model->parameters()) {
    for (double& v : p.mutable_values()) v = 0.3 * (2 * rng.Uniform() - 1);
  }
  return *std::move(model);
}

TEST(CadpTest, NoNoiseAndLooseClipIsRoundTrip) {
  auto data = data::MakeSynthetic(data::SyntheticKind::kTwoGaussians, 100, 1);
  auto inputs = data::MakeFlowInputs(*data, {});
  const auto model = RandomGin(2, 2, 5);
  PrivacyParams p{.epsilon = 1.0, .sensitivity = 1e6, .clip_mode = ClipMode::kClipOnly};
  auto out = CadpPrivatize(model, inputs->x, inputs->conditions, p, 1, false);
  ASSERT_TRUE(out.ok());
  for (std::size_t i = 0; i < out->x.size(); ++i) {
    EXPECT_NEAR(out->x.values()[i], inputs->x.values()[i], 1e-6);
  }
  EXPECT_TRUE(out->warnings.empty());
}

TEST(CadpTest, DatasetPreservesLabelsAndIsDeterministic) {
  auto data = data::MakeSynthetic(data::SyntheticKind::kCategoricalMixture, 100, 2);
  ASSERT_TRUE(data.ok());
  const data::ConditionSpec cond{data::ConditionSource::kBinaryFeature, "sex"};
  const auto model = RandomGin(9, 2, 6);
  PrivacyParams p{.epsilon = 1.0, .sensitivity = 1.0};
  auto a = PrivatizeDataset(model, *data, cond, p, 7);
  auto b = PrivatizeDataset(model, *data, cond, p, 7);
  auto c = PrivatizeDataset(model, *data, cond, p, 8);
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  EXPECT_EQ(a->data.size(), 100u);
  EXPECT_EQ(a->data.labels, data->labels);
  EXPECT_EQ(a->data.schema, data->schema);
  EXPECT_EQ(a->data, b->data);
  const std::size_t sex = *data::FeatureIndex(*data, "sex");
  std::size_t differ = 0;
  for (std::size_t r = 0; r < 100; ++r) {
    EXPECT_EQ(a->data.features(r, sex), data->features(r, sex));
    bool row_differs = false;
    for (std::size_t k = 0; k < data->dim(); ++k) {
      row_differs |= a->data.features(r, k) != c->data.features(r, k);
    }
    differ += row_differs;
  }
  EXPECT_GE(differ, 99u);
}

TEST(CadpTest, RowsUseIndependentStreams) {
  // Privatizing a prefix gives the same rows as the full batch, up to the
  // last-bit differences of batch-size dependent matrix kernels.
  auto data = data::MakeSynthetic(data::SyntheticKind::kTwoGaussians, 50, 3);
  auto inputs = data::MakeFlowInputs(*data, {});
  const auto model = RandomGin(2, 2, 9);
  PrivacyParams p{.epsilon = 2.0, .sensitivity = 1.0};
  auto full = CadpPrivatize(model, inputs->x, inputs->conditions, p, 4);
  std::vector<std::size_t> first(10);
  std::iota(first.begin(), first.end(), 0);
  auto part = CadpPrivatize(model, inputs->x.SelectRows(first),
                            inputs->conditions.SelectRows(first), p, 4);
  ASSERT_TRUE(full.ok() && part.ok());
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(full->x(r, k), part->x(r, k), 1e-12);
  }
}

TEST(CadpTest, WarnsForNonVolumePreservingModels) {
  flow::FlowConfig c;
  c.dim = 2;
  c.cond_dim = 2;
  c.blocks = {flow::CouplingKind::kAffineGlow};
  c.hidden = {4};
  auto model = flow::FlowModel::Create(c);
  PrivacyParams p{.epsilon = 1.0, .sensitivity = 1.0, .strict_accounting = true};
  Matrix x(3, 2, 0.5), cond(3, 2);
  for (std::size_t r = 0; r < 3; ++r) cond(r, 0) = 1;
  auto out = CadpPrivatize(*model, x, cond, p, 1);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out->warnings.size(), 2u);
  EXPECT_FALSE(CadpPrivatize(*model, Matrix(3, 3), cond, p, 1).ok());
}

TEST(CadpTest, ZeroLatentUnderRescaleAlwaysFails) {
  flow::FlowConfig c;
  c.dim = 2;
  c.cond_dim = 1;
  c.blocks = {flow::CouplingKind::kGin};
  auto model = flow::FlowModel::Create(c);  // identity
  PrivacyParams p;
  Matrix x(4, 2);
  x(1, 0) = 0.5;  // rows 0, 2 and 3 encode to the zero latent
  auto out = CadpPrivatize(*model, x, Matrix(4, 1, 1.0), p, 1);
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(out.status().message(), ::testing::HasSubstr("indices: 0, 2, 3"));
  p.clip_mode = ClipMode::kClipOnly;
  EXPECT_TRUE(CadpPrivatize(*model, x, Matrix(4, 1, 1.0), p, 1).ok());
}

}  // namespace
}  // namespace cadp::privacy
