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

#include "s2st/audio/wav_io.h"

#include <algorithm>
#include <cmath>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::audio {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

struct WavLayout {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
  std::string_view payload;
};

WavLayout ParseLayout(std::string_view bytes, const std::string& name) {
  ByteReader in(bytes, name);
  if (bytes.size() < 12 || in.GetBytes(4) != "RIFF") throw ParseError(name + ": not a RIFF file");
  in.GetU32();
  if (in.GetBytes(4) != "WAVE") throw ParseError(name + ": not a WAVE file");
  WavLayout layout;
  bool have_fmt = false, have_data = false;
  while (in.remaining() >= 8 && !have_data) {
    const std::string_view id = in.GetBytes(4);
    const uint32_t size = in.GetU32();
    if (size > in.remaining()) throw ParseError(name + ": chunk extends past end of file");
    std::string_view body = in.GetBytes(size);
    if (size % 2 == 1 && in.remaining() > 0) in.GetBytes(1);
    if (id == "fmt ") {
      ByteReader fmt(body, name);
      const uint32_t w0 = fmt.GetU32();
      layout.format = static_cast<uint16_t>(w0 & 0xFFFF);
      layout.channels = static_cast<uint16_t>(w0 >> 16);
      layout.sample_rate = fmt.GetU32();
      fmt.GetU32();
      const uint32_t w3 = fmt.GetU32();
      layout.bits = static_cast<uint16_t>(w3 >> 16);
      if (layout.format == kFormatExtensible && body.size() >= 26) {
        ByteReader ext(body.substr(24), name);
        layout.format = static_cast<uint16_t>(ext.GetU32() & 0xFFFF);
      }
      have_fmt = true;
    } else if (id == "data") {
      layout.payload = body;
      have_data = true;
    }
  }
  if (!have_fmt || !have_data) throw ParseError(name + ": missing fmt or data chunk");
  if (layout.channels != 1) {
    throw ParseError(name + ": expected mono audio, got " + std::to_string(layout.channels) +
                     " channels");
  }
  const bool pcm16 = layout.format == kFormatPcm && layout.bits == 16;
  const bool f32 = layout.format == kFormatFloat && layout.bits == 32;
  if (!pcm16 && !f32) {
    throw ParseError(name + ": unsupported sample format " + std::to_string(layout.format) +
                     "/" + std::to_string(layout.bits) + " bits");
  }
  return layout;
}

}  // namespace

Waveform ReadWav(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  const WavLayout layout = ParseLayout(bytes, path.string());
  Waveform wave;
  wave.sample_rate = static_cast<int>(layout.sample_rate);
  ByteReader in(layout.payload, path.string());
  if (layout.bits == 16) {
    const size_t n = layout.payload.size() / 2;
    wave.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const auto lo = static_cast<uint8_t>(layout.payload[2 * i]);
      const auto hi = static_cast<uint8_t>(layout.payload[2 * i + 1]);
      const auto v = static_cast<int16_t>(lo | (hi << 8));
      wave.samples[i] = static_cast<float>(v) / 32768.0f;
    }
  } else {
    const size_t n = layout.payload.size() / 4;
    wave.samples.resize(n);
    for (size_t i = 0; i < n; ++i) wave.samples[i] = in.GetF32();
  }
  ValidateWaveform(wave);
  return wave;
}

void WriteWav(const std::filesystem::path& path, const Waveform& wave, WavEncoding encoding) {
  ValidateWaveform(wave);
  const uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const uint16_t format = encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat;
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * (bits / 8));
  ByteWriter out;
  out.PutBytes("RIFF");
  out.PutU32(36 + data_bytes);
  out.PutBytes("WAVE");
  out.PutBytes("fmt ");
  out.PutU32(16);
  out.PutU32(static_cast<uint32_t>(format) | (1u << 16));
  out.PutU32(static_cast<uint32_t>(wave.sample_rate));
  out.PutU32(static_cast<uint32_t>(wave.sample_rate) * (bits / 8));
  out.PutU32(static_cast<uint32_t>(bits / 8) | (static_cast<uint32_t>(bits) << 16));
  out.PutBytes("data");
  out.PutU32(data_bytes);
  if (encoding == WavEncoding::kPcm16) {
    std::string pcm(data_bytes, '\0');
    for (size_t i = 0; i < wave.samples.size(); ++i) {
      const float clipped = std::clamp(wave.samples[i], -1.0f, 1.0f);
      const auto v = static_cast<int16_t>(std::lround(clipped * 32767.0f));
      pcm[2 * i] = static_cast<char>(v & 0xFF);
      pcm[2 * i + 1] = static_cast<char>((v >> 8) & 0xFF);
    }
    out.PutBytes(pcm);
  } else {
    for (float v : wave.samples) out.PutF32(v);
  }
  WriteFileBytes(path, out.bytes());
}

double WavDurationSeconds(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  const WavLayout layout = ParseLayout(bytes, path.string());
  const double n = static_cast<double>(layout.payload.size()) / (layout.bits / 8);
  return n / layout.sample_rate;
}

}  // namespace s2st::audio
