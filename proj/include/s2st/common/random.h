// Copyright 2026 The s2st Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef S2ST_COMMON_RANDOM_H_
#define S2ST_COMMON_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace s2st {

// Mixes a base seed with a list of stream tags. Used to derive independent,
// reproducible streams (per step, per utterance, per layer) from one seed.
uint64_t DeriveSeed(uint64_t seed, std::initializer_list<uint64_t> tags);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi);
  // Uniform integer in [lo, hi].
  int64_t UniformInt(int64_t lo, int64_t hi);
  double Normal(double mean, double stddev);
  bool Bernoulli(double p);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    // Fisher-Yates with our own index draw so results do not depend on the
    // standard library's shuffle implementation.
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(0, i - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace s2st

#endif  // S2ST_COMMON_RANDOM_H_
