// Copyright 2026 The prtriage Authors.
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

#ifndef PRTRIAGE_RNG_H_
#define PRTRIAGE_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace prtriage {

// Mixes a root seed with stream identifiers (splitmix64 finalizer). Used so
// that parallel work items draw from independent, thread-count-agnostic
// streams.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream_a,
                         std::uint64_t stream_b = 0);

// Seeded generator whose variates are computed here rather than by the
// standard distributions, so sequences are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform();
  // Uniform integer on [0, bound); bound > 0. Unbiased.
  std::uint64_t UniformInt(std::uint64_t bound);
  bool Bernoulli(double p) { return Uniform() < p; }
  double Normal();
  double Exponential();
  std::int64_t Poisson(double lambda);

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace prtriage

#endif  // PRTRIAGE_RNG_H_
