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

#ifndef S2ST_ND_GRADIENT_SUITE_H_
#define S2ST_ND_GRADIENT_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace s2st::nd {

struct GradientCase {
  std::string name;
  double max_relative_error = 0.0;
  int64_t entries = 0;
};

// Finite-difference checks of every primitive on small random tensors.
// Each case differentiates sum(op(inputs) * R) for a fixed random R.
std::vector<GradientCase> RunPrimitiveGradientSuite(uint64_t seed, double eps = 1e-5);

}  // namespace s2st::nd

#endif  // S2ST_ND_GRADIENT_SUITE_H_
