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

#ifndef S2ST_TRAIN_SCHEDULE_H_
#define S2ST_TRAIN_SCHEDULE_H_

#include <cstdint>

namespace s2st::train {

// Linear warmup then inverse-square-root decay:
//   base_lr * min(step / warmup, sqrt(warmup / step)),
// peaking at exactly base_lr when step == warmup. Step 0 raises
// ContractError; warmup 0 means no warmup (decay from step 1 onward is
// then base_lr / sqrt(step)).
double LrAtStep(int64_t step, double base_lr, int64_t warmup_steps);

}  // namespace s2st::train

#endif  // S2ST_TRAIN_SCHEDULE_H_
