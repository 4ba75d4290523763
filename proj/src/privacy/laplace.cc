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

#include "cadp/privacy/laplace.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cadp::privacy {

double LaplaceInverseCdf(double u, double scale) {
  const double c = u - 0.5;
  if (c == 0.0) return 0.0;
  const double sign = c > 0.0 ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(c));
}

double LaplaceCdf(double x, double scale) {
  return x < 0.0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

LaplaceSampler::LaplaceSampler(double scale, Rng rng)
    : scale_(scale), rng_(std::move(rng)) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("Laplace scale must be positive and finite");
  }
}

void LaplaceSampler::Fill(std::span<double> out) {
  for (double& v : out) v = Sample();
}

std::vector<double> LaplaceNoise(LaplaceSampler& sampler, std::size_t n) {
  std::vector<double> out(n);
  sampler.Fill(out);
  return out;
}

double KolmogorovSmirnovStatistic(std::vector<double> samples,
                                  const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double KolmogorovSmirnovCritical01(std::size_t n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

}  // namespace cadp::privacy
