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

#include "cadp/numerics/tensor.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <utility>

namespace cadp::numerics {
namespace {

std::atomic<uint64_t> next_node_id{1};
thread_local bool grad_enabled = true;

}  // namespace

namespace internal {

std::vector<double>& GradBuffer(Node& n) {
  if (n.grad.empty()) n.grad.assign(n.values.size(), 0.0);
  return n.grad;
}

}  // namespace internal

std::size_t ShapeSize(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor MakeTensor(Shape shape, std::vector<double> values,
                  bool requires_grad) {
  if (ShapeSize(shape) != values.size()) {
    throw std::invalid_argument("tensor shape " + ShapeToString(shape) +
                                " does not match " +
                                std::to_string(values.size()) + " values");
  }
  if (!std::all_of(values.begin(), values.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw NumericalError("tensor values must be finite");
  }
  auto node = std::make_shared<internal::Node>();
  node->id = next_node_id.fetch_add(1, std::memory_order_relaxed);
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor::Tensor() : Tensor(MakeTensor({}, {0.0}, false)) {}

Tensor::Tensor(std::shared_ptr<internal::Node> node) : node_(std::move(node)) {}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::Full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = ShapeSize(shape);
  return MakeTensor(std::move(shape), std::vector<double>(n, value),
                    requires_grad);
}

Tensor Tensor::FromValues(Shape shape, std::vector<double> values,
                          bool requires_grad) {
  return MakeTensor(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return MakeTensor({}, {value}, requires_grad);
}

Tensor Tensor::FromMatrix(const Matrix& m, bool requires_grad) {
  return MakeTensor({m.rows(), m.cols()}, m.values(), requires_grad);
}

double Tensor::item() const {
  if (size() != 1) {
    throw std::invalid_argument("item() on tensor of shape " +
                                ShapeToString(shape()));
  }
  return node_->values[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  if (ndim() != 2 || r >= dim(0) || c >= dim(1)) {
    throw std::out_of_range("Tensor::at(r, c) out of range");
  }
  return node_->values[r * dim(1) + c];
}

Tensor Tensor::Detach() const {
  return MakeTensor(node_->shape, node_->values, false);
}

Matrix Tensor::ToMatrix() const {
  if (ndim() != 2) {
    throw std::invalid_argument("ToMatrix() needs a 2-D tensor, got " +
                                ShapeToString(shape()));
  }
  return Matrix(dim(0), dim(1), node_->values);
}

Tape& Tape::ForThisThread() {
  thread_local Tape tape;
  return tape;
}

void Tape::Record(std::span<const Tensor> inputs, const Tensor& output,
                  std::function<void()> backward) {
  Entry entry;
  entry.output_id = output.id();
  entry.output = output.node();
  for (const Tensor& t : inputs) {
    // Inputs always exist before the op that consumes them.
    if (t.id() >= output.id()) {
      throw std::logic_error("tape: input recorded after its consumer");
    }
    entry.input_ids.push_back(t.id());
    entry.inputs.push_back(t.node());
  }
  entry.backward = std::move(backward);
  entries_.push_back(std::move(entry));
}

bool GradEnabled() { return grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }

NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

void Backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw std::invalid_argument("Backward: loss must be a scalar, got shape " +
                                ShapeToString(loss.shape()));
  }
  Tape& tape = Tape::ForThisThread();
  if (tape.size() == 0 || !loss.requires_grad()) {
    throw std::logic_error("Backward: loss is not connected to a recording");
  }
  internal::GradBuffer(*loss.node())[0] = 1.0;
  const auto& entries = tape.entries();
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (!it->output->grad.empty()) it->backward();
  }
  tape.Clear();
}

}  // namespace cadp::numerics
