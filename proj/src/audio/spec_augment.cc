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

#include "s2st/audio/spec_augment.h"

#include <algorithm>
#include <cmath>

#include "s2st/common/error.h"
#include "s2st/common/random.h"

namespace s2st::audio {

int SpecAugmentPolicy::TimeWidthCap(int64_t num_frames) const {
  int64_t cap = time_mask_width_max;
  if (time_mask_ratio > 0.0) {
    cap = std::min<int64_t>(cap, static_cast<int64_t>(std::floor(time_mask_ratio * num_frames)));
  }
  return static_cast<int>(std::clamp<int64_t>(cap, 0, num_frames));
}

void SpecAugmentPolicy::Validate() const {
  if (freq_mask_width_max < 0 || n_freq_masks < 0 || time_mask_width_max < 0 ||
      n_time_masks < 0 || time_mask_ratio < 0.0) {
    throw InvalidArgumentError("spec_augment: counts and widths must be non-negative");
  }
  if (freq_mask_width_max > kNumMels) {
    throw InvalidArgumentError("spec_augment: freq_mask_width_max must be <= 80");
  }
}

MelSpectrogram SpecAugment(const MelSpectrogram& mel, const SpecAugmentPolicy& policy,
                           uint64_t seed) {
  mel.Validate();
  policy.Validate();
  MelSpectrogram out = mel;
  Rng rng(seed);
  const int64_t frames = mel.num_frames;
  for (int i = 0; i < policy.n_freq_masks; ++i) {
    const int width = static_cast<int>(rng.UniformInt(0, policy.freq_mask_width_max));
    const int start = static_cast<int>(rng.UniformInt(0, kNumMels - width));
    for (int64_t t = 0; t < frames; ++t) {
      for (int c = start; c < start + width; ++c) out.at(t, c) = policy.mask_value;
    }
  }
  if (frames == 0) return out;
  const int time_cap = policy.TimeWidthCap(frames);
  for (int i = 0; i < policy.n_time_masks; ++i) {
    const int64_t width = rng.UniformInt(0, time_cap);
    const int64_t start = rng.UniformInt(0, frames - width);
    for (int64_t t = start; t < start + width; ++t) {
      for (int c = 0; c < kNumMels; ++c) out.at(t, c) = policy.mask_value;
    }
  }
  return out;
}

}  // namespace s2st::audio
