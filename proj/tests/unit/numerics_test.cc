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

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <stdexcept>
#include <vector>

#include "cadp/base/rng.h"
#include "cadp/numerics/gradcheck.h"
#include "cadp/numerics/mlp.h"
#include "cadp/numerics/ops.h"
#include "cadp/numerics/optim.h"
#include "cadp/numerics/tensor.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace cadp::numerics {
namespace {

using ::testing::ElementsAre;
using ::testing::DoubleNear;

std::vector<double> Values(const Tensor& t) {
  return {t.values().begin(), t.values().end()};
}

Tensor RandomTensor(Shape shape, Rng& rng, double lo = -2.0, double hi = 2.0,
                    bool requires_grad = true) {
  std::vector<double> v(ShapeSize(shape));
  for (double& x : v) x = lo + (hi - lo) * rng.Uniform();
  return Tensor::FromValues(std::move(shape), std::move(v), requires_grad);
}

TEST(ElementwiseTest, Examples) {
  EXPECT_THAT(Values(Add(Tensor::FromValues({2}, {1, 2}),
                         Tensor::FromValues({2}, {3, 4}))),
              ElementsAre(4, 6));
  EXPECT_THAT(Values(Exp(Tensor::FromValues({1}, {0}))), ElementsAre(1));
  EXPECT_THAT(Values(Log(Tensor::FromValues({1}, {std::numbers::e}))),
              ElementsAre(DoubleNear(1.0, 1e-15)));
  EXPECT_THAT(Values(Scale(Tensor::FromValues({2}, {1, -2}), 3)),
              ElementsAre(3, -6));
  EXPECT_THAT(Values(Relu(Tensor::FromValues({3}, {-1, 0, 2}))),
              ElementsAre(0, 0, 2));
}

TEST(ElementwiseTest, ScalarBroadcast) {
  Tensor s = Tensor::Scalar(2.0);
  Tensor v = Tensor::FromValues({3}, {1, 2, 3});
  EXPECT_THAT(Values(Mul(s, v)), ElementsAre(2, 4, 6));
  EXPECT_THAT(Values(Sub(v, s)), ElementsAre(-1, 0, 1));
}

TEST(ElementwiseTest, ShapeMismatchRejected) {
  EXPECT_THROW(Add(Tensor::Zeros({2}), Tensor::Zeros({3})),
               std::invalid_argument);
  EXPECT_THROW(Mul(Tensor::Zeros({2, 2}), Tensor::Zeros({4})),
               std::invalid_argument);
}

TEST(ElementwiseTest, LogOfNonPositiveIsDomainError) {
  EXPECT_THROW(Log(Tensor::FromValues({2}, {1.0, 0.0})), std::domain_error);
  EXPECT_THROW(Log(Tensor::FromValues({1}, {-3.0})), std::domain_error);
}

TEST(ElementwiseTest, OverflowIsReportedNotStored) {
  EXPECT_THROW(Exp(Tensor::FromValues({1}, {1000.0})), NumericalError);
  EXPECT_THROW(Tensor::FromValues({1}, {std::nan("")}), NumericalError);
}

TEST(MatmulTest, Examples) {
  Tensor eye = Tensor::FromValues({2, 2}, {1, 0, 0, 1});
  Tensor m = Tensor::FromValues({2, 2}, {1, 2, 3, 4});
  EXPECT_THAT(Values(Matmul(eye, m)), ElementsAre(1, 2, 3, 4));
  EXPECT_THAT(Values(Matmul(Tensor::FromValues({1, 2}, {1, 0}),
                            Tensor::FromValues({2, 1}, {2, 3}))),
              ElementsAre(2));
}

TEST(MatmulTest, MatchesTripleLoop) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor a = RandomTensor({5, 7}, rng, -2, 2, false);
    Tensor b = RandomTensor({7, 3}, rng, -2, 2, false);
    Tensor c = Matmul(a, b);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        double expected = 0.0;
        for (std::size_t k = 0; k < 7; ++k) expected += a.at(i, k) * b.at(k, j);
        EXPECT_NEAR(c.at(i, j), expected, 1e-12);
      }
    }
  }
}

TEST(MatmulTest, DimensionMismatchRejected) {
  EXPECT_THROW(Matmul(Tensor::Zeros({2, 3}), Tensor::Zeros({2, 3})),
               std::invalid_argument);
  EXPECT_THROW(Matmul(Tensor::Zeros({3}), Tensor::Zeros({3, 1})),
               std::invalid_argument);
}

TEST(ReduceTest, Examples) {
  EXPECT_EQ(Reduce(ReduceOp::kL1Norm, Tensor::FromValues({2}, {3, -1})).item(),
            4.0);
  EXPECT_EQ(Sum(Tensor::FromValues({3}, {1, 2, 3})).item(), 6.0);
  Tensor m = Tensor::FromValues({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_THAT(Values(Reduce(ReduceOp::kSum, m, 0)), ElementsAre(5, 7, 9));
  EXPECT_THAT(Values(Reduce(ReduceOp::kMean, m, 1)), ElementsAre(2, 5));
  EXPECT_THAT(Values(Reduce(ReduceOp::kL2NormSq, m, 1)), ElementsAre(14, 77));
}

TEST(ReduceTest, InvalidAxisRejected) {
  EXPECT_THROW(Reduce(ReduceOp::kSum, Tensor::Zeros({2, 2}), 2),
               std::invalid_argument);
  EXPECT_THROW(Reduce(ReduceOp::kSum, Tensor::Zeros({4}), 1),
               std::invalid_argument);
}

TEST(ReduceTest, MeanOfManyNormalsIsNearZero) {
  Rng rng(2024);
  std::vector<double> draws(1'000'000);
  for (double& d : draws) d = rng.Normal();
  const std::size_t n = draws.size();
  const double mean = Mean(Tensor::FromValues({n}, std::move(draws))).item();
  EXPECT_NEAR(mean, 0.0, 0.01);
}

TEST(ReduceTest, L1SubgradientAtZeroIsZero) {
  Tensor w = Tensor::FromValues({3}, {0.0, 2.0, -1.0}, true);
  Backward(Reduce(ReduceOp::kL1Norm, w));
  EXPECT_THAT(Values(Tensor::FromValues({3}, {w.grad().begin(), w.grad().end()})),
              ElementsAre(0.0, 1.0, -1.0));
}

TEST(BackwardTest, LinearAndQuadratic) {
  Tensor w = Tensor::FromValues({2}, {0.5, -0.5}, true);
  Tensor x = Tensor::FromValues({2}, {2, 3});
  Backward(Sum(Mul(w, x)));
  EXPECT_THAT(std::vector<double>(w.grad().begin(), w.grad().end()),
              ElementsAre(2, 3));

  Tensor v = Tensor::FromValues({2}, {1, -2}, true);
  Backward(Scale(Sum(Mul(v, v)), 0.5));
  EXPECT_THAT(std::vector<double>(v.grad().begin(), v.grad().end()),
              ElementsAre(1, -2));
}

TEST(BackwardTest, NonScalarLossRejected) {
  Tensor w = Tensor::FromValues({2}, {1, 2}, true);
  Tensor y = Scale(w, 2.0);
  EXPECT_THROW(Backward(y), std::invalid_argument);
  Tape::ForThisThread().Clear();
}

TEST(BackwardTest, EmptyTapeRejected) {
  Tape::ForThisThread().Clear();
  EXPECT_THROW(Backward(Tensor::Scalar(1.0)), std::logic_error);
}

TEST(BackwardTest, TapeClearedAndTopologicallyOrdered) {
  Tensor w = Tensor::FromValues({2}, {1, 2}, true);
  Tensor loss = Sum(Tanh(Mul(w, w)));
  const Tape& tape = Tape::ForThisThread();
  ASSERT_EQ(tape.size(), 3u);
  for (const auto& entry : tape.entries()) {
    for (uint64_t in : entry.input_ids) EXPECT_LT(in, entry.output_id);
  }
  Backward(loss);
  EXPECT_EQ(tape.size(), 0u);
}

TEST(BackwardTest, NoGradGuardSuppressesRecording) {
  Tensor w = Tensor::FromValues({2}, {1, 2}, true);
  {
    NoGradGuard guard;
    Tensor y = Sum(Mul(w, w));
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_EQ(Tape::ForThisThread().size(), 0u);
}

TEST(BackwardTest, TwoLayerMlpMatchesFiniteDifferences) {
  Rng rng(5);
  Mlp mlp({.sizes = {4, 6, 3}, .activation = Activation::kTanh}, rng);
  Tensor x = RandomTensor({5, 4}, rng, -2, 2, false);
  const std::vector<int> labels = {0, 2, 1, 1, 0};
  auto loss = [&] { return SoftmaxCrossEntropy(mlp.Forward(x), labels); };
  EXPECT_LT(FiniteDiffCheck(loss, mlp.parameters(), 1e-5), 1e-4);
}

TEST(FiniteDiffCheckTest, Examples) {
  auto square = [](const Tensor& w) { return Sum(Mul(w, w)); };
  EXPECT_LT(FiniteDiffCheck(square, Tensor::FromValues({1}, {3.0}), 1e-5),
            1e-6);
  Rng rng(9);
  auto tanh_sum = [](const Tensor& w) { return Sum(Tanh(w)); };
  EXPECT_LT(FiniteDiffCheck(tanh_sum, RandomTensor({10}, rng), 1e-5), 1e-4);
  EXPECT_THROW(FiniteDiffCheck(tanh_sum, Tensor::Zeros({1}), 0.0),
               std::invalid_argument);
}

// Every differentiable op against central differences on inputs in [-2, 2].
class OpGradientTest
    : public ::testing::TestWithParam<
          std::pair<const char*, std::function<Tensor(const Tensor&)>>> {};

TEST_P(OpGradientTest, MatchesFiniteDifferences) {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    Tensor p = RandomTensor({3, 4}, rng);
    // Weighted sum makes every output coordinate matter differently.
    EXPECT_LT(FiniteDiffCheck(GetParam().second, p, 1e-5), 1e-4)
        << GetParam().first;
  }
}

Tensor Weighted(const Tensor& t) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.1 * i;
  return Sum(Mul(t, Tensor::FromValues(t.shape(), w)));
}

const Tensor kOther = Tensor::FromValues(
    {3, 4}, {0.5, -1.2, 0.3, 1.7, -0.4, 0.9, 1.1, -1.9, 0.2, 0.6, -0.8, 1.4});

INSTANTIATE_TEST_SUITE_P(
    AllOps, OpGradientTest,
    ::testing::Values(
        std::make_pair("add", [](const Tensor& p) { return Weighted(Add(p, kOther)); }),
        std::make_pair("sub", [](const Tensor& p) { return Weighted(Sub(kOther, p)); }),
        std::make_pair("mul", [](const Tensor& p) { return Weighted(Mul(p, p)); }),
        std::make_pair("exp", [](const Tensor& p) { return Weighted(Exp(p)); }),
        std::make_pair("log", [](const Tensor& p) { return Weighted(Log(Add(Mul(p, p), Tensor::Scalar(0.5)))); }),
        std::make_pair("tanh", [](const Tensor& p) { return Weighted(Tanh(p)); }),
        std::make_pair("relu", [](const Tensor& p) { return Weighted(Relu(p)); }),
        std::make_pair("negate", [](const Tensor& p) { return Weighted(Negate(p)); }),
        std::make_pair("scale", [](const Tensor& p) { return Weighted(Scale(p, -1.7)); }),
        std::make_pair("scalar_mul", [](const Tensor& p) { return Weighted(Mul(SliceCols(p, 0, 1), Tensor::Scalar(1.0))); }),
        std::make_pair("matmul_left", [](const Tensor& p) {
          return Weighted(Matmul(p, Tensor::FromValues({4, 2}, {1, 2, -1, 0.5, 0.3, -0.7, 2, 1})));
        }),
        std::make_pair("matmul_right", [](const Tensor& p) {
          return Weighted(Matmul(Tensor::FromValues({2, 3}, {1, -2, 0.5, 0.3, 1.1, -0.9}), p));
        }),
        std::make_pair("sum", [](const Tensor& p) { return Sum(Mul(p, p)); }),
        std::make_pair("mean_axis0", [](const Tensor& p) { return Weighted(Reduce(ReduceOp::kMean, Mul(p, p), 0)); }),
        std::make_pair("sum_axis1", [](const Tensor& p) { return Weighted(Reduce(ReduceOp::kSum, Tanh(p), 1)); }),
        std::make_pair("l1_axis1", [](const Tensor& p) { return Weighted(Reduce(ReduceOp::kL1Norm, p, 1)); }),
        std::make_pair("l2sq", [](const Tensor& p) { return Reduce(ReduceOp::kL2NormSq, p); }),
        std::make_pair("add_bias", [](const Tensor& p) {
          return Weighted(Tanh(AddBias(kOther, Reduce(ReduceOp::kSum, p, 0))));
        }),
        std::make_pair("slice", [](const Tensor& p) { return Weighted(SliceCols(Mul(p, p), 1, 3)); }),
        std::make_pair("concat", [](const Tensor& p) {
          return Weighted(ConcatCols(SliceCols(p, 2, 4), Tanh(SliceCols(p, 0, 2))));
        }),
        std::make_pair("permute", [](const Tensor& p) {
          const std::size_t perm[] = {2, 0, 3, 1};
          return Weighted(Mul(PermuteCols(p, perm), kOther));
        }),
        std::make_pair("center_rows", [](const Tensor& p) { return Weighted(Exp(CenterRows(p))); }),
        std::make_pair("cross_entropy", [](const Tensor& p) {
          const int labels[] = {3, 0, 1};
          return SoftmaxCrossEntropy(p, labels);
        })),
    [](const auto& info) { return std::string(info.param.first); });

TEST(DeterminismTest, SeededComputationIsBitwiseRepeatable) {
  auto run = [] {
    Rng rng(123);
    Mlp mlp({.sizes = {3, 8, 2}}, rng);
    Tensor x = RandomTensor({4, 3}, rng, -2, 2, false);
    const int labels[] = {0, 1, 1, 0};
    Tensor loss = SoftmaxCrossEntropy(mlp.Forward(x), labels);
    Backward(loss);
    std::vector<double> out = {loss.item()};
    for (const Tensor& p : mlp.parameters()) {
      out.insert(out.end(), p.grad().begin(), p.grad().end());
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(MlpTest, ZeroInitOutputGivesZero) {
  Rng rng(1);
  Mlp mlp({.sizes = {3, 5, 4}, .zero_init_output = true}, rng);
  Tensor x = RandomTensor({2, 3}, rng, -2, 2, false);
  const Tensor out = mlp.Forward(x);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(OptimizerTest, AdamMinimizesQuadratic) {
  Tensor w = Tensor::FromValues({2}, {3.0, -4.0}, true);
  Adam adam({w}, {.learning_rate = 0.1});
  for (int i = 0; i < 500; ++i) {
    adam.ZeroGrad();
    Backward(Sum(Mul(w, w)));
    adam.StepFromGrads();
  }
  EXPECT_NEAR(w.at(0), 0.0, 1e-3);
  EXPECT_NEAR(w.at(1), 0.0, 1e-3);
}

TEST(OptimizerTest, SgdStepIsPlainUpdate) {
  Tensor w = Tensor::FromValues({2}, {1.0, 2.0}, true);
  Sgd sgd({w}, 0.5);
  const double grad[] = {2.0, -2.0};
  sgd.Step(grad);
  EXPECT_THAT(Values(w), ElementsAre(0.0, 3.0));
}

TEST(RngTest, StreamsAreReproducibleAndDistinct) {
  Rng a = Rng::ForStream(7, 3), b = Rng::ForStream(7, 3), c = Rng::ForStream(7, 4);
  const uint64_t x = a.NextU64();
  EXPECT_EQ(x, b.NextU64());
  EXPECT_NE(x, c.NextU64());
  Rng u(1);
  for (int i = 0; i < 100000; ++i) {
    const double v = u.UniformOpen();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

}  // namespace
}  // namespace cadp::numerics
