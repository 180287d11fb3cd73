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

#include "s2st/audio/mel_io.h"

#include <string>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::audio {

namespace {
constexpr std::string_view kMagic = "S2STMEL1";
}  // namespace

void WriteMel(const std::filesystem::path& path, const MelSpectrogram& mel) {
  mel.Validate();
  ByteWriter out;
  out.PutBytes(kMagic);
  out.PutI32(static_cast<int32_t>(mel.num_frames));
  out.PutI32(kNumMels);
  out.PutI32(mel.sample_rate);
  out.PutI32(mel.hop_length);
  for (float v : mel.data) out.PutF32(v);
  WriteFileBytes(path, out.bytes());
}

MelSpectrogram ReadMel(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  ByteReader in(bytes, path.string());
  if (in.GetBytes(kMagic.size()) != kMagic) throw ParseError(path.string() + ": bad mel magic");
  MelSpectrogram mel;
  mel.num_frames = in.GetI32();
  const int32_t channels = in.GetI32();
  mel.sample_rate = in.GetI32();
  mel.hop_length = in.GetI32();
  if (mel.num_frames < 0 || channels != kNumMels) {
    throw ParseError(path.string() + ": bad mel header T=" + std::to_string(mel.num_frames) +
                     " channels=" + std::to_string(channels));
  }
  const size_t n = static_cast<size_t>(mel.num_frames) * kNumMels;
  if (in.remaining() != n * 4) {
    throw IntegrityError(path.string() + ": expected " + std::to_string(n * 4) +
                         " payload bytes, found " + std::to_string(in.remaining()));
  }
  mel.data.resize(n);
  for (size_t i = 0; i < n; ++i) mel.data[i] = in.GetF32();
  mel.Validate();
  return mel;
}

}  // namespace s2st::audio
