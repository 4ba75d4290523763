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

#include "cadp/numerics/ops.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace cadp::numerics {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutableMap = Eigen::Map<RowMatrix>;

using internal::GradBuffer;
using internal::Node;

bool AnyRequiresGrad(std::initializer_list<const Tensor*> inputs) {
  if (!GradEnabled()) return false;
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor* t) { return t->requires_grad(); });
}

// Wraps freshly computed values, rejecting non-finite output.
Tensor Result(const char* op, Shape shape, std::vector<double> values,
              bool requires_grad) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericalError(std::string(op) + ": produced a non-finite value");
    }
  }
  return MakeTensor(std::move(shape), std::move(values), requires_grad);
}

void RequireMatrix(const Tensor& a, const char* op) {
  if (a.ndim() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected 2-D tensor, got " +
                                ShapeToString(a.shape()));
  }
}

enum class Binary { kAdd, kSub, kMul };

Tensor BinaryOp(Binary kind, const char* name, const Tensor& a,
                const Tensor& b) {
  const bool same = a.shape() == b.shape();
  const bool a_scalar = a.size() == 1 && !same;
  const bool b_scalar = b.size() == 1 && !same;
  if (!same && !a_scalar && !b_scalar) {
    throw std::invalid_argument(std::string(name) + ": shape mismatch " +
                                ShapeToString(a.shape()) + " vs " +
                                ShapeToString(b.shape()));
  }
  const Shape shape = a_scalar ? b.shape() : a.shape();
  const std::size_t n = ShapeSize(shape);
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = av[a_scalar ? 0 : i];
    const double y = bv[b_scalar ? 0 : i];
    switch (kind) {
      case Binary::kAdd: out[i] = x + y; break;
      case Binary::kSub: out[i] = x - y; break;
      case Binary::kMul: out[i] = x * y; break;
    }
  }
  const bool rg = AnyRequiresGrad({&a, &b});
  Tensor result = Result(name, shape, std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* bn = b.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a, b};
    Tape::ForThisThread().Record(inputs, result, [=] {
      const auto& g = on->grad;
      for (int side = 0; side < 2; ++side) {
        Node* target = side == 0 ? an : bn;
        if (!target->requires_grad) continue;
        Node* other = side == 0 ? bn : an;
        const bool target_scalar = side == 0 ? a_scalar : b_scalar;
        const bool other_scalar = side == 0 ? b_scalar : a_scalar;
        const double sign = (kind == Binary::kSub && side == 1) ? -1.0 : 1.0;
        auto& tg = GradBuffer(*target);
        for (std::size_t i = 0; i < g.size(); ++i) {
          double d = sign * g[i];
          if (kind == Binary::kMul) d *= other->values[other_scalar ? 0 : i];
          tg[target_scalar ? 0 : i] += d;
        }
      }
    });
  }
  return result;
}

// Unary op with derivative expressed through input x and output y.
template <typename F, typename D>
Tensor UnaryOp(const char* name, const Tensor& a, F forward, D derivative) {
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = forward(av[i]);
  const bool rg = AnyRequiresGrad({&a});
  Tensor result = Result(name, a.shape(), std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a};
    Tape::ForThisThread().Record(inputs, result, [=] {
      auto& ag = GradBuffer(*an);
      for (std::size_t i = 0; i < ag.size(); ++i) {
        ag[i] += on->grad[i] * derivative(an->values[i], on->values[i]);
      }
    });
  }
  return result;
}

}  // namespace

Tensor Add(const Tensor& a, const Tensor& b) {
  return BinaryOp(Binary::kAdd, "add", a, b);
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  return BinaryOp(Binary::kSub, "sub", a, b);
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  return BinaryOp(Binary::kMul, "mul", a, b);
}

Tensor Exp(const Tensor& a) {
  return UnaryOp(
      "exp", a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor Log(const Tensor& a) {
  for (double v : a.values()) {
    if (!(v > 0.0)) {
      throw std::domain_error("log: non-positive input " + std::to_string(v));
    }
  }
  return UnaryOp(
      "log", a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor Tanh(const Tensor& a) {
  return UnaryOp(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Relu(const Tensor& a) {
  return UnaryOp(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor Negate(const Tensor& a) {
  return UnaryOp(
      "negate", a, [](double x) { return -x; },
      [](double, double) { return -1.0; });
}

Tensor Scale(const Tensor& a, double factor) {
  return UnaryOp(
      "scale", a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor Matmul(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "matmul");
  RequireMatrix(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw std::invalid_argument("matmul: inner dimensions differ " +
                                ShapeToString(a.shape()) + " x " +
                                ShapeToString(b.shape()));
  }
  std::vector<double> out(m * n);
  MutableMap(out.data(), m, n).noalias() =
      ConstMap(a.values().data(), m, k) * ConstMap(b.values().data(), k, n);
  const bool rg = AnyRequiresGrad({&a, &b});
  Tensor result = Result("matmul", {m, n}, std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* bn = b.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a, b};
    Tape::ForThisThread().Record(inputs, result, [=] {
      ConstMap g(on->grad.data(), m, n);
      if (an->requires_grad) {
        MutableMap(GradBuffer(*an).data(), m, k).noalias() +=
            g * ConstMap(bn->values.data(), k, n).transpose();
      }
      if (bn->requires_grad) {
        MutableMap(GradBuffer(*bn).data(), k, n).noalias() +=
            ConstMap(an->values.data(), m, k).transpose() * g;
      }
    });
  }
  return result;
}

Tensor Reduce(ReduceOp op, const Tensor& a, std::optional<std::size_t> axis) {
  const char* name = "reduce";
  std::size_t outer = 1, inner = a.size();  // reduce over `inner`
  std::size_t stride_out = 0;               // layout selector, see below
  Shape out_shape;
  if (axis.has_value()) {
    if (a.ndim() == 1 && *axis == 0) {
      // Whole-vector reduction.
    } else if (a.ndim() == 2 && *axis == 1) {
      outer = a.dim(0);
      inner = a.dim(1);
      out_shape = {outer};
    } else if (a.ndim() == 2 && *axis == 0) {
      outer = a.dim(1);
      inner = a.dim(0);
      out_shape = {outer};
      stride_out = 1;
    } else {
      throw std::invalid_argument("reduce: invalid axis " +
                                  std::to_string(*axis) + " for shape " +
                                  ShapeToString(a.shape()));
    }
  }
  if (inner == 0) throw std::invalid_argument("reduce: empty axis");
  // Index of element j (0 <= j < inner) in output slot o.
  const std::size_t cols = a.ndim() == 2 ? a.dim(1) : 0;
  auto index = [=](std::size_t o, std::size_t j) {
    if (outer == 1 && out_shape.empty()) return j;
    return stride_out == 0 ? o * inner + j : j * cols + o;
  };
  const auto av = a.values();
  std::vector<double> out(outer, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    double acc = 0.0;
    for (std::size_t j = 0; j < inner; ++j) {
      const double x = av[index(o, j)];
      switch (op) {
        case ReduceOp::kSum:
        case ReduceOp::kMean: acc += x; break;
        case ReduceOp::kL1Norm: acc += std::abs(x); break;
        case ReduceOp::kL2NormSq: acc += x * x; break;
      }
    }
    out[o] = op == ReduceOp::kMean ? acc / static_cast<double>(inner) : acc;
  }
  const bool rg = AnyRequiresGrad({&a});
  Tensor result = Result(name, out_shape, std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a};
    Tape::ForThisThread().Record(inputs, result, [=] {
      auto& ag = GradBuffer(*an);
      for (std::size_t o = 0; o < outer; ++o) {
        const double g = on->grad[o];
        for (std::size_t j = 0; j < inner; ++j) {
          const std::size_t i = index(o, j);
          const double x = an->values[i];
          switch (op) {
            case ReduceOp::kSum: ag[i] += g; break;
            case ReduceOp::kMean: ag[i] += g / static_cast<double>(inner); break;
            case ReduceOp::kL1Norm:
              ag[i] += x > 0.0 ? g : (x < 0.0 ? -g : 0.0);
              break;
            case ReduceOp::kL2NormSq: ag[i] += 2.0 * x * g; break;
          }
        }
      }
    });
  }
  return result;
}

Tensor AddBias(const Tensor& a, const Tensor& bias) {
  RequireMatrix(a, "add_bias");
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  if (bias.ndim() != 1 || bias.dim(0) != cols) {
    throw std::invalid_argument("add_bias: bias shape " +
                                ShapeToString(bias.shape()) +
                                " does not match " + ShapeToString(a.shape()));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  const auto bv = bias.values();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bv[c];
  }
  const bool rg = AnyRequiresGrad({&a, &bias});
  Tensor result = Result("add_bias", a.shape(), std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* bn = bias.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a, bias};
    Tape::ForThisThread().Record(inputs, result, [=] {
      const auto& g = on->grad;
      if (an->requires_grad) {
        auto& ag = GradBuffer(*an);
        for (std::size_t i = 0; i < g.size(); ++i) ag[i] += g[i];
      }
      if (bn->requires_grad) {
        auto& bg = GradBuffer(*bn);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) bg[c] += g[r * cols + c];
        }
      }
    });
  }
  return result;
}

Tensor SliceCols(const Tensor& a, std::size_t begin, std::size_t end) {
  RequireMatrix(a, "slice_cols");
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  if (begin > end || end > cols) {
    throw std::invalid_argument("slice_cols: range [" + std::to_string(begin) +
                                ", " + std::to_string(end) + ") outside " +
                                ShapeToString(a.shape()));
  }
  const std::size_t width = end - begin;
  std::vector<double> out(rows * width);
  const auto av = a.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.begin() + r * cols + begin, width,
                out.begin() + r * width);
  }
  const bool rg = AnyRequiresGrad({&a});
  Tensor result = Result("slice_cols", {rows, width}, std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a};
    Tape::ForThisThread().Record(inputs, result, [=] {
      auto& ag = GradBuffer(*an);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          ag[r * cols + begin + c] += on->grad[r * width + c];
        }
      }
    });
  }
  return result;
}

Tensor ConcatCols(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "concat_cols");
  RequireMatrix(b, "concat_cols");
  if (a.dim(0) != b.dim(0)) {
    throw std::invalid_argument("concat_cols: row counts differ " +
                                ShapeToString(a.shape()) + " vs " +
                                ShapeToString(b.shape()));
  }
  const std::size_t rows = a.dim(0), na = a.dim(1), nb = b.dim(1);
  const std::size_t width = na + nb;
  std::vector<double> out(rows * width);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.begin() + r * na, na, out.begin() + r * width);
    std::copy_n(bv.begin() + r * nb, nb, out.begin() + r * width + na);
  }
  const bool rg = AnyRequiresGrad({&a, &b});
  Tensor result = Result("concat_cols", {rows, width}, std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* bn = b.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a, b};
    Tape::ForThisThread().Record(inputs, result, [=] {
      const auto& g = on->grad;
      if (an->requires_grad) {
        auto& ag = GradBuffer(*an);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < na; ++c) ag[r * na + c] += g[r * width + c];
        }
      }
      if (bn->requires_grad) {
        auto& bg = GradBuffer(*bn);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < nb; ++c) {
            bg[r * nb + c] += g[r * width + na + c];
          }
        }
      }
    });
  }
  return result;
}

Tensor PermuteCols(const Tensor& a, std::span<const std::size_t> perm) {
  RequireMatrix(a, "permute_cols");
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  if (perm.size() != cols) {
    throw std::invalid_argument("permute_cols: permutation length mismatch");
  }
  std::vector<bool> seen(cols, false);
  for (std::size_t p : perm) {
    if (p >= cols || seen[p]) {
      throw std::invalid_argument("permute_cols: not a permutation");
    }
    seen[p] = true;
  }
  std::vector<std::size_t> order(perm.begin(), perm.end());
  std::vector<double> out(rows * cols);
  const auto av = a.values();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out[r * cols + c] = av[r * cols + order[c]];
    }
  }
  const bool rg = AnyRequiresGrad({&a});
  Tensor result = Result("permute_cols", a.shape(), std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a};
    Tape::ForThisThread().Record(inputs, result, [=] {
      auto& ag = GradBuffer(*an);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          ag[r * cols + order[c]] += on->grad[r * cols + c];
        }
      }
    });
  }
  return result;
}

Tensor CenterRows(const Tensor& a) {
  RequireMatrix(a, "center_rows");
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  if (cols == 0) throw std::invalid_argument("center_rows: zero columns");
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mean += out[r * cols + c];
    mean /= static_cast<double>(cols);
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] -= mean;
  }
  const bool rg = AnyRequiresGrad({&a});
  Tensor result = Result("center_rows", a.shape(), std::move(out), rg);
  if (rg) {
    Node* an = a.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {a};
    Tape::ForThisThread().Record(inputs, result, [=] {
      auto& ag = GradBuffer(*an);
      const auto& g = on->grad;
      for (std::size_t r = 0; r < rows; ++r) {
        double mean = 0.0;
        for (std::size_t c = 0; c < cols; ++c) mean += g[r * cols + c];
        mean /= static_cast<double>(cols);
        for (std::size_t c = 0; c < cols; ++c) {
          ag[r * cols + c] += g[r * cols + c] - mean;
        }
      }
    });
  }
  return result;
}

Matrix Softmax(const Tensor& logits) {
  RequireMatrix(logits, "softmax");
  const std::size_t rows = logits.dim(0), cols = logits.dim(1);
  Matrix out(rows, cols);
  const auto lv = logits.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = lv.data() + r * cols;
    const double mx = *std::max_element(row, row + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = std::exp(row[c] - mx);
      total += out(r, c);
    }
    for (std::size_t c = 0; c < cols; ++c) out(r, c) /= total;
  }
  return out;
}

Tensor SoftmaxCrossEntropy(const Tensor& logits, std::span<const int> labels) {
  RequireMatrix(logits, "softmax_cross_entropy");
  const std::size_t rows = logits.dim(0), cols = logits.dim(1);
  if (labels.size() != rows || rows == 0) {
    throw std::invalid_argument("softmax_cross_entropy: label count mismatch");
  }
  std::vector<int> targets(labels.begin(), labels.end());
  for (int y : targets) {
    if (y < 0 || static_cast<std::size_t>(y) >= cols) {
      throw std::invalid_argument("softmax_cross_entropy: label out of range");
    }
  }
  Matrix probs = Softmax(logits);
  const auto lv = logits.values();
  double loss = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = lv.data() + r * cols;
    const double mx = *std::max_element(row, row + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += std::exp(row[c] - mx);
    loss += mx + std::log(total) - row[targets[r]];
  }
  loss /= static_cast<double>(rows);
  const bool rg = AnyRequiresGrad({&logits});
  Tensor result = Result("softmax_cross_entropy", {}, {loss}, rg);
  if (rg) {
    Node* ln = logits.node().get();
    Node* on = result.node().get();
    const Tensor inputs[] = {logits};
    Tape::ForThisThread().Record(
        inputs, result, [=, probs = std::move(probs)] {
          auto& lg = GradBuffer(*ln);
          const double g = on->grad[0] / static_cast<double>(rows);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
              const double onehot =
                  static_cast<std::size_t>(targets[r]) == c ? 1.0 : 0.0;
              lg[r * cols + c] += g * (probs(r, c) - onehot);
            }
          }
        });
  }
  return result;
}

}  // namespace cadp::numerics
