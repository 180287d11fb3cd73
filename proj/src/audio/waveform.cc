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

#include "s2st/audio/waveform.h"

#include <cmath>
#include <string>

#include "s2st/common/error.h"

namespace s2st::audio {

void MelSpectrogram::Validate() const {
  if (num_frames < 0 || static_cast<int64_t>(data.size()) != num_frames * kNumMels) {
    throw InvalidArgumentError("mel spectrogram must be T x 80, got " +
                               std::to_string(data.size()) + " values for T=" +
                               std::to_string(num_frames));
  }
  for (float v : data) {
    if (!std::isfinite(v)) throw InvalidArgumentError("mel spectrogram has non-finite entry");
  }
}

void ValidateWaveform(const Waveform& wave) {
  if (wave.sample_rate <= 0) {
    throw InvalidArgumentError("sample rate must be positive, got " +
                               std::to_string(wave.sample_rate));
  }
  for (float v : wave.samples) {
    if (!std::isfinite(v)) throw InvalidArgumentError("waveform has non-finite sample");
  }
}

}  // namespace s2st::audio
