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

#include "cadp/flow/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "absl/strings/str_cat.h"

namespace cadp::flow {
namespace {

double MaxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double LatentDiagnostics::MaxAbsMean() const { return MaxAbs(mean); }
double LatentDiagnostics::MinVariance() const {
  return variance.empty() ? 0.0 : *std::min_element(variance.begin(), variance.end());
}
double LatentDiagnostics::MaxVariance() const {
  return variance.empty() ? 0.0 : *std::max_element(variance.begin(), variance.end());
}
double LatentDiagnostics::MaxAbsSkew() const { return MaxAbs(skewness); }
double LatentDiagnostics::MaxAbsExcessKurtosis() const {
  return MaxAbs(excess_kurtosis);
}

LatentDiagnostics DiagnoseLatents(const Matrix& z,
                                  const NormalityThresholds& thresholds) {
  const std::size_t n = z.rows(), d = z.cols();
  if (n < 2) throw std::invalid_argument("latent diagnostics need >= 2 samples");
  LatentDiagnostics out;
  out.samples = n;
  out.mean.assign(d, 0.0);
  out.variance.assign(d, 0.0);
  out.skewness.assign(d, 0.0);
  out.excess_kurtosis.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) out.mean[c] += z(r, c);
  }
  for (double& m : out.mean) m /= static_cast<double>(n);
  std::vector<double> m3(d, 0.0), m4(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double e = z(r, c) - out.mean[c];
      const double e2 = e * e;
      out.variance[c] += e2;
      m3[c] += e2 * e;
      m4[c] += e2 * e2;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double var = out.variance[c] / static_cast<double>(n);
    out.variance[c] = var;
    if (var > 0.0) {
      out.skewness[c] = m3[c] / n / std::pow(var, 1.5);
      out.excess_kurtosis[c] = m4[c] / n / (var * var) - 3.0;
    }
  }

  // Max |corr| over pairs, via the centred Gram matrix.
  Matrix centred(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double sd = std::sqrt(out.variance[c]);
      centred(r, c) = sd > 0.0 ? (z(r, c) - out.mean[c]) / sd : 0.0;
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += centred(r, a) * centred(r, b);
      out.max_abs_correlation =
          std::max(out.max_abs_correlation, std::abs(s / static_cast<double>(n)));
    }
  }

  auto flag = [&](const std::string& what, double value, double limit) {
    out.findings.push_back(absl::StrCat(what, " ", value, " (limit ", limit, ")"));
  };
  if (out.MaxAbsMean() > thresholds.max_abs_mean) {
    flag("max |mean|", out.MaxAbsMean(), thresholds.max_abs_mean);
  }
  if (out.MinVariance() < thresholds.min_variance) {
    flag("min variance", out.MinVariance(), thresholds.min_variance);
  }
  if (out.MaxVariance() > thresholds.max_variance) {
    flag("max variance", out.MaxVariance(), thresholds.max_variance);
  }
  if (out.MaxAbsSkew() > thresholds.max_abs_skew) {
    flag("max |skew|", out.MaxAbsSkew(), thresholds.max_abs_skew);
  }
  if (out.MaxAbsExcessKurtosis() > thresholds.max_abs_excess_kurtosis) {
    flag("max |excess kurtosis|", out.MaxAbsExcessKurtosis(),
         thresholds.max_abs_excess_kurtosis);
  }
  out.passed = out.findings.empty();
  return out;
}

LatentDiagnostics DiagnoseModel(const FlowModel& model, const Matrix& x,
                                const Matrix& c,
                                const NormalityThresholds& thresholds) {
  return DiagnoseLatents(model.Encode(x, c), thresholds);
}

}  // namespace cadp::flow
