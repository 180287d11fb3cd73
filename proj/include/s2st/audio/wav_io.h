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

#ifndef S2ST_AUDIO_WAV_IO_H_
#define S2ST_AUDIO_WAV_IO_H_

#include <filesystem>

#include "s2st/audio/waveform.h"

namespace s2st::audio {

enum class WavEncoding { kPcm16, kFloat32 };

// Reads a single-channel RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE
// float samples. Other layouts raise ParseError.
Waveform ReadWav(const std::filesystem::path& path);

void WriteWav(const std::filesystem::path& path, const Waveform& wave,
              WavEncoding encoding = WavEncoding::kFloat32);

// Duration from the header alone.
double WavDurationSeconds(const std::filesystem::path& path);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_WAV_IO_H_
