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

#include "s2st/train/schedule.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "s2st/common/error.h"

namespace s2st::train {

double LrAtStep(int64_t step, double base_lr, int64_t warmup_steps) {
  if (step < 1) throw ContractError("lr schedule: step must be >= 1, got " + std::to_string(step));
  if (warmup_steps < 0) throw ContractError("lr schedule: negative warmup");
  const double s = static_cast<double>(step);
  if (warmup_steps == 0) return base_lr / std::sqrt(s);
  const double w = static_cast<double>(warmup_steps);
  if (step == warmup_steps) return base_lr;
  return base_lr * std::min(s / w, std::sqrt(w / s));
}

}  // namespace s2st::train
