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

#ifndef S2ST_AUDIO_STFT_H_
#define S2ST_AUDIO_STFT_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace s2st::audio {

struct StftLayout {
  int window_length = 400;
  int fft_size = 512;
  int hop_length = 160;

  int num_bins() const { return fft_size / 2 + 1; }
};

// Periodic Hann window.
std::vector<double> HannWindow(int length);

struct ComplexSpectrogram {
  int64_t num_frames = 0;
  int num_bins = 0;
  std::vector<std::complex<double>> data;  // num_frames x num_bins

  std::complex<double>* row(int64_t t) { return data.data() + t * num_bins; }
  const std::complex<double>* row(int64_t t) const { return data.data() + t * num_bins; }
};

// Centered STFT with reflect padding: frame t is centered on sample t*hop and
// there are ceil(N / hop) frames. The window occupies the first
// window_length points of each FFT buffer.
ComplexSpectrogram Stft(std::span<const double> samples, const StftLayout& layout);

// Overlap-add inverse of Stft with window-power normalization, trimmed to
// `length` samples.
std::vector<double> Istft(const ComplexSpectrogram& spec, const StftLayout& layout,
                          int64_t length);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_STFT_H_
