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

#ifndef CADP_NUMERICS_TENSOR_H_
#define CADP_NUMERICS_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cadp/numerics/matrix.h"

namespace cadp::numerics {

using Shape = std::vector<std::size_t>;

// Raised when an operation would produce NaN or Inf. Tensors never hold
// non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {

struct Node {
  uint64_t id = 0;
  Shape shape;
  std::vector<double> values;
  // Empty until a gradient has been accumulated.
  std::vector<double> grad;
  bool requires_grad = false;
};

// Returns n.grad, allocating a zero buffer on first use.
std::vector<double>& GradBuffer(Node& n);

}  // namespace internal

// Handle to a dense float64 array that may participate in reverse-mode
// differentiation. Copies share storage (like a smart pointer); use Detach()
// for an independent copy.
class Tensor {
 public:
  // A scalar zero.
  Tensor();

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, double value, bool requires_grad = false);
  static Tensor FromValues(Shape shape, std::vector<double> values,
                           bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);
  static Tensor FromMatrix(const Matrix& m, bool requires_grad = false);

  const Shape& shape() const { return node_->shape; }
  std::size_t ndim() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t size() const { return node_->values.size(); }
  uint64_t id() const { return node_->id; }

  std::span<const double> values() const { return node_->values; }
  // Direct write access, meant for leaves (parameter updates, perturbation in
  // gradient checks). Writing into a recorded intermediate corrupts backward.
  std::span<double> mutable_values() { return node_->values; }

  double item() const;
  double at(std::size_t i) const { return node_->values.at(i); }
  double at(std::size_t r, std::size_t c) const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool value) { node_->requires_grad = value; }

  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  void ZeroGrad() { node_->grad.clear(); }

  Tensor Detach() const;
  Matrix ToMatrix() const;

  const std::shared_ptr<internal::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<internal::Node> node);
  friend Tensor MakeTensor(Shape shape, std::vector<double> values,
                           bool requires_grad);

  std::shared_ptr<internal::Node> node_;
};

// Builds a tensor, validating shape and finiteness of `values`.
Tensor MakeTensor(Shape shape, std::vector<double> values, bool requires_grad);

std::size_t ShapeSize(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Define-by-run operation record, one per thread. Operations append an entry
// when gradient mode is on and any input requires a gradient; Backward()
// replays the entries in reverse and then clears the tape.
class Tape {
 public:
  struct Entry {
    std::vector<uint64_t> input_ids;
    uint64_t output_id = 0;
    std::vector<std::shared_ptr<internal::Node>> inputs;
    std::shared_ptr<internal::Node> output;
    std::function<void()> backward;
  };

  static Tape& ForThisThread();

  void Record(std::span<const Tensor> inputs, const Tensor& output,
              std::function<void()> backward);

  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  void Clear() { entries_.clear(); }

 private:
  std::vector<Entry> entries_;
};

bool GradEnabled();

// Disables recording for its lifetime (on this thread).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Populates .grad of every requires_grad tensor reachable from `loss`
// (accumulating into existing leaf gradients) and clears the tape.
// Throws std::invalid_argument for a non-scalar loss and std::logic_error when
// nothing was recorded.
void Backward(const Tensor& loss);

}  // namespace cadp::numerics

#endif  // CADP_NUMERICS_TENSOR_H_
