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

#ifndef S2ST_AUDIO_MEL_IO_H_
#define S2ST_AUDIO_MEL_IO_H_

#include <filesystem>

#include "s2st/audio/waveform.h"

namespace s2st::audio {

// Flat binary layout: "S2STMEL1", then T, 80, sample_rate, hop_length as
// little-endian int32, then T*80 row-major float32 values.
void WriteMel(const std::filesystem::path& path, const MelSpectrogram& mel);
MelSpectrogram ReadMel(const std::filesystem::path& path);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_MEL_IO_H_
