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

#ifndef S2ST_AUDIO_RESAMPLE_H_
#define S2ST_AUDIO_RESAMPLE_H_

#include "s2st/audio/waveform.h"

namespace s2st::audio {

// Band-limited rate conversion with a Kaiser-windowed sinc filter evaluated
// per polyphase branch. Output length is ceil(N * target / source). Returns
// the input unchanged when the rates already agree.
Waveform Resample(const Waveform& wave, int target_sr);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_RESAMPLE_H_
