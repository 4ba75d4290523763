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

#ifndef CADP_PRIVACY_LAPLACE_H_
#define CADP_PRIVACY_LAPLACE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cadp/base/rng.h"

namespace cadp::privacy {

// Laplace(0, b) by inverse CDF: x = -b sign(u - 1/2) ln(1 - 2|u - 1/2|).
double LaplaceInverseCdf(double u, double scale);
double LaplaceCdf(double x, double scale);

class LaplaceSampler {
 public:
  // Throws std::invalid_argument unless scale > 0.
  LaplaceSampler(double scale, Rng rng);

  double Sample() { return LaplaceInverseCdf(rng_.UniformOpen(), scale_); }
  void Fill(std::span<double> out);
  double scale() const { return scale_; }

 private:
  double scale_;
  Rng rng_;
};

std::vector<double> LaplaceNoise(LaplaceSampler& sampler, std::size_t n);

// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double KolmogorovSmirnovStatistic(std::vector<double> samples,
                                  const std::function<double(double)>& cdf);

// Asymptotic critical value at significance 0.01: 1.628 / sqrt(n).
double KolmogorovSmirnovCritical01(std::size_t n);

}  // namespace cadp::privacy

#endif  // CADP_PRIVACY_LAPLACE_H_
