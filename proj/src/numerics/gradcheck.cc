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

#include "cadp/numerics/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cadp/base/rng.h"

namespace cadp::numerics {

double FiniteDiffCheck(const std::function<Tensor(const Tensor&)>& f,
                       const Tensor& params, double h) {
  Tensor p = params.Detach();
  p.set_requires_grad(true);
  Tensor ps[] = {p};
  return FiniteDiffCheck([&] { return f(p); }, ps, h);
}

double FiniteDiffCheck(const std::function<Tensor()>& loss_fn,
                       std::span<Tensor> params, double h,
                       std::size_t max_coords, uint64_t seed) {
  if (!(h > 0.0)) throw std::invalid_argument("FiniteDiffCheck: h must be > 0");
  for (Tensor& p : params) p.ZeroGrad();
  Tape::ForThisThread().Clear();
  Backward(loss_fn());

  Rng rng(seed);
  double worst = 0.0;
  for (Tensor& p : params) {
    std::vector<double> analytic(p.grad().begin(), p.grad().end());
    analytic.resize(p.size(), 0.0);
    std::vector<std::size_t> coords(p.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (max_coords > 0 && coords.size() > max_coords) {
      rng.Shuffle(std::span<std::size_t>(coords));
      coords.resize(max_coords);
    }
    auto values = p.mutable_values();
    NoGradGuard no_grad;
    for (std::size_t i : coords) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss_fn().item();
      values[i] = saved - h;
      const double down = loss_fn().item();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(analytic[i] - numeric) /
                                  (std::abs(analytic[i]) + 1e-8));
    }
  }
  return worst;
}

}  // namespace cadp::numerics
