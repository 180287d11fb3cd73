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

#ifndef S2ST_AUDIO_CMVN_H_
#define S2ST_AUDIO_CMVN_H_

#include <span>
#include <vector>

#include "s2st/audio/waveform.h"

namespace s2st::audio {

// Per-channel mean and variance over all frames of a set of spectrograms.
struct CmvnStats {
  std::vector<double> mean = std::vector<double>(kNumMels, 0.0);
  std::vector<double> var = std::vector<double>(kNumMels, 1.0);
};

// Streaming accumulator. Finish() floors each variance at var_floor so that
// constant channels still normalize.
class CmvnAccumulator {
 public:
  void Add(const MelSpectrogram& mel);
  int64_t frames() const { return frames_; }
  CmvnStats Finish(double var_floor = 1e-6) const;

 private:
  int64_t frames_ = 0;
  std::vector<double> sum_ = std::vector<double>(kNumMels, 0.0);
  std::vector<double> sum_sq_ = std::vector<double>(kNumMels, 0.0);
};

CmvnStats ComputeCmvnStats(std::span<const MelSpectrogram> mels, double var_floor = 1e-6);

// (x - mean_c) / sqrt(var_c). Non-positive variance raises InvalidArgumentError.
MelSpectrogram CmvnNormalize(const MelSpectrogram& mel, const CmvnStats& stats);
MelSpectrogram CmvnDenormalize(const MelSpectrogram& mel, const CmvnStats& stats);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_CMVN_H_
