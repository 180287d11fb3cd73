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

#ifndef S2ST_MODEL_GRADIENT_CHECK_H_
#define S2ST_MODEL_GRADIENT_CHECK_H_

#include <cstdint>
#include <string>

#include "s2st/nd/gradcheck.h"

namespace s2st::model {

struct ModelGradientReport {
  nd::FiniteDiffReport diff;
  std::string worst_parameter;
};

// Finite-difference check of the complete training loss (prompted encoder,
// spectrogram and stop terms, both auxiliary decoders) on the 2-layer,
// dim-16 configuration in 64-bit mode. Parameters are jittered away from
// their structured initial values (zero biases, unit gains) so that no ReLU
// input sits exactly on its kink, and spectrogram targets are kept clear of
// the predictions so that the L1 term is differentiable at the check point.
ModelGradientReport CheckModelGradients(uint64_t seed, double eps = 1e-5);

}  // namespace s2st::model

#endif  // S2ST_MODEL_GRADIENT_CHECK_H_
