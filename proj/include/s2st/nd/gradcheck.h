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

#ifndef S2ST_ND_GRADCHECK_H_
#define S2ST_ND_GRADCHECK_H_

#include <functional>
#include <span>

#include "s2st/nd/tensor.h"

namespace s2st::nd {

struct FiniteDiffReport {
  double max_relative_error = 0.0;
  int64_t entries_checked = 0;
  uint64_t worst_param_id = 0;
  int64_t worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares reverse-mode gradients of the scalar program f against central
// differences, probing every entry of every parameter (leaf tensors that f
// reads). The relative error of an entry is
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// f is evaluated twice up front; differing results raise DeterminismError.
FiniteDiffReport FiniteDiffCheckReport(const std::function<Tensor()>& f,
                                       std::span<const Tensor> params, double eps = 1e-5);

double FiniteDiffCheck(const std::function<Tensor()>& f, std::span<const Tensor> params,
                       double eps = 1e-5);

}  // namespace s2st::nd

#endif  // S2ST_ND_GRADCHECK_H_
