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

#ifndef CADP_DPSGD_DPSGD_H_
#define CADP_DPSGD_DPSGD_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cadp/base/rng.h"
#include "cadp/classifier/classifier.h"
#include "cadp/data/dataset.h"

namespace cadp::dpsgd {

inline constexpr double kDefaultDelta = 1e-5;

struct DpSgdConfig {
  double clip_norm = 1.0;  // C, L2
  double noise_multiplier = 1.0;  // sigma; noise std is sigma * C
  std::size_t lot_size = 512;
  double learning_rate = 5e-4;
  std::size_t steps = 500;
  double delta = kDefaultDelta;
};

// Rejects non-positive lot/steps/learning rate/delta and negative sigma or C.
// sigma = 0 and C = inf are accepted (they turn the mechanism off) but warn.
absl::Status ValidateDpSgdConfig(const DpSgdConfig& config);
std::vector<std::string> DpSgdWarnings(const DpSgdConfig& config,
                                       std::size_t dataset_size);

// grad * min(1, C / ||grad||_2), in place. Returns the norm before clipping.
double PerSampleClip(std::span<double> grad, double clip_norm);

// Clips each per-example gradient, sums, adds N(0, (sigma C)^2) per
// coordinate and divides by the lot size.
class DpSgdAggregator : public classifier::GradientAggregator {
 public:
  DpSgdAggregator(double clip_norm, double noise_multiplier);
  void Begin(std::size_t num_parameters) override;
  void Add(std::span<const double> gradient) override;
  std::vector<double> Finish(std::size_t batch_size, Rng& rng) override;

  // Largest per-example norm after clipping, over all batches so far.
  double max_clipped_norm() const { return max_clipped_norm_; }
  std::size_t clipped_count() const { return clipped_count_; }

 private:
  double clip_norm_;
  double noise_multiplier_;
  std::vector<double> sum_;
  std::vector<double> scratch_;
  double max_clipped_norm_ = 0.0;
  std::size_t clipped_count_ = 0;
};

struct StepResult {
  bool skipped = false;
  std::string warning;
};

// One plain-SGD DP step on `batch` (whose size must equal the lot size):
// params -= lr * (sum of clipped grads + noise) / lot. A non-finite
// per-example gradient skips the step and leaves the parameters untouched.
absl::StatusOr<StepResult> DpSgdStep(classifier::ClassifierModel& model,
                                     const data::LabeledDataset& batch,
                                     const DpSgdConfig& config, Rng& rng);

struct AccountantResult {
  double epsilon = 0.0;  // min(basic, advanced)
  double basic = 0.0;
  double advanced = 0.0;
  bool vacuous = false;  // epsilon > kVacuousEpsilon
};

inline constexpr double kVacuousEpsilon = 50.0;

// Conservative epsilon for `steps` lots of size `lot_size` drawn from
// `dataset_size` rows: per-step Gaussian bound, amplified by the sampling
// rate, then composed both linearly and with the advanced theorem.
absl::StatusOr<AccountantResult> SimpleAccountant(double noise_multiplier,
                                                  std::size_t lot_size,
                                                  std::size_t dataset_size,
                                                  std::size_t steps, double delta);

// Smallest sigma (to 1e-6 relative) whose accounted epsilon is <= target.
absl::StatusOr<double> CalibrateNoiseMultiplier(double target_epsilon,
                                                std::size_t lot_size,
                                                std::size_t dataset_size,
                                                std::size_t steps, double delta);

struct DpTrainResult {
  classifier::TrainResult train;
  AccountantResult privacy;
  double max_clipped_norm = 0.0;
};

// Trains with the classifier's optimizer on DP-aggregated updates. The lot
// size, step count and learning rate come from `config` and overwrite the
// model's training settings.
absl::StatusOr<DpTrainResult> TrainDpSgd(classifier::ClassifierModel& model,
                                         const data::LabeledDataset& data,
                                         const DpSgdConfig& config);

}  // namespace cadp::dpsgd

#endif  // CADP_DPSGD_DPSGD_H_
