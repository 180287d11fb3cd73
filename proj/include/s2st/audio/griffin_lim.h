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

#ifndef S2ST_AUDIO_GRIFFIN_LIM_H_
#define S2ST_AUDIO_GRIFFIN_LIM_H_

#include <vector>

#include "s2st/audio/mel.h"
#include "s2st/audio/waveform.h"

namespace s2st::audio {

// Recovers a non-negative linear power spectrogram (T x num_bins) whose mel
// projection approximates exp(mel), by multiplicative non-negative least
// squares updates started from the transposed filterbank.
std::vector<double> MelToLinearPower(const MelSpectrogram& mel, const FrontendConfig& cfg,
                                     int nnls_iterations = 100);

// Griffin-Lim phase reconstruction from zero initial phase. Returns
// T * hop_length samples at cfg.sample_rate.
Waveform GriffinLimInvert(const MelSpectrogram& mel, const FrontendConfig& cfg, int iterations);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_GRIFFIN_LIM_H_
