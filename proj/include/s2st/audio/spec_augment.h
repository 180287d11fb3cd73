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

#ifndef S2ST_AUDIO_SPEC_AUGMENT_H_
#define S2ST_AUDIO_SPEC_AUGMENT_H_

#include <cstdint>

#include "s2st/audio/waveform.h"

namespace s2st::audio {

struct SpecAugmentPolicy {
  int freq_mask_width_max = 27;
  int n_freq_masks = 2;
  int time_mask_width_max = 40;  // frames
  // When positive, the time width cap is further limited to
  // floor(time_mask_ratio * T).
  double time_mask_ratio = 0.05;
  int n_time_masks = 2;
  float mask_value = 0.0f;

  // Largest time-mask width allowed for an utterance of T frames.
  int TimeWidthCap(int64_t num_frames) const;
  void Validate() const;

  static SpecAugmentPolicy Disabled() { return {0, 0, 0, 0.0, 0, 0.0f}; }
};

// Frequency masks first, then time masks; every draw comes from a generator
// seeded with `seed`, so the output is a pure function of its inputs.
MelSpectrogram SpecAugment(const MelSpectrogram& mel, const SpecAugmentPolicy& policy,
                           uint64_t seed);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_SPEC_AUGMENT_H_
