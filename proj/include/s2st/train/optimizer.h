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

#ifndef S2ST_TRAIN_OPTIMIZER_H_
#define S2ST_TRAIN_OPTIMIZER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "s2st/common/binary_io.h"
#include "s2st/nd/autograd.h"
#include "s2st/nd/parameters.h"

namespace s2st::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  // Global gradient-norm clip; <= 0 disables clipping.
  double clip_norm = 1.0;
};

// Adam with bias correction over the trainable entries of a ParameterSet.
// Moments are kept per parameter name in double precision. A parameter
// without a gradient entry is treated as having a zero gradient.
class AdamOptimizer {
 public:
  AdamOptimizer(const nd::ParameterSet& params, AdamConfig config = {});

  struct StepInfo {
    double grad_norm = 0.0;  // before clipping
    double clip_scale = 1.0;
  };

  // One update at learning rate `lr`. Entries rejected by `trainable` are
  // neither updated nor have their moments touched. Values are rounded to
  // `precision` afterwards. Shape mismatches raise ShapeError.
  StepInfo Step(nd::ParameterSet& params, const nd::GradientMap& grads, double lr,
                nd::Precision precision,
                const std::function<bool(const std::string&)>& trainable = {});

  int64_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<double>& first_moment(size_t entry) const { return m_[entry]; }
  const std::vector<double>& second_moment(size_t entry) const { return v_[entry]; }

  // u64 step, u32 count, then per entry {name, u32 size, f64 m..., f64 v...}.
  void SerializeTo(ByteWriter& out) const;
  // Names and sizes must match the parameter set this optimizer was built for.
  void DeserializeFrom(ByteReader& in);

 private:
  AdamConfig config_;
  int64_t step_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace s2st::train

#endif  // S2ST_TRAIN_OPTIMIZER_H_
