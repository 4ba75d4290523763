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

#ifndef CADP_BASE_RNG_H_
#define CADP_BASE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace cadp {

// Seeded pseudo-random stream. All variates are derived from raw 64-bit
// mt19937_64 output with fixed formulas (no std:: distributions), so a given
// seed yields the same sequence on every standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // An independent stream keyed by (seed, stream_id), e.g. one per sample.
  static Rng ForStream(uint64_t seed, uint64_t stream_id);

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

  // Uniform on the open interval (0, 1).
  double UniformOpen();

  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();

  // Uniform integer in [0, n). Requires n > 0.
  std::size_t UniformIndex(std::size_t n);

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformIndex(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// SplitMix64 finalizer; used to derive stream seeds.
uint64_t MixSeed(uint64_t value);

}  // namespace cadp

#endif  // CADP_BASE_RNG_H_
