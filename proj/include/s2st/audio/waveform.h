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

#ifndef S2ST_AUDIO_WAVEFORM_H_
#define S2ST_AUDIO_WAVEFORM_H_

#include <cstdint>
#include <vector>

namespace s2st::audio {

inline constexpr int kNumMels = 80;

struct Waveform {
  std::vector<float> samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

enum class MelOrigin { kSource, kTarget, kPredicted };

// T x 80 log-mel matrix, row-major.
struct MelSpectrogram {
  int64_t num_frames = 0;
  std::vector<float> data;
  int sample_rate = 0;
  int hop_length = 0;
  MelOrigin origin = MelOrigin::kSource;

  float at(int64_t t, int c) const { return data[t * kNumMels + c]; }
  float& at(int64_t t, int c) { return data[t * kNumMels + c]; }
  const float* row(int64_t t) const { return data.data() + t * kNumMels; }

  // Throws InvalidArgumentError unless data has num_frames * 80 finite values.
  void Validate() const;
};

// Throws InvalidArgumentError on non-finite samples or a non-positive rate.
void ValidateWaveform(const Waveform& wave);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_WAVEFORM_H_
