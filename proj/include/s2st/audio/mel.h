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

#ifndef S2ST_AUDIO_MEL_H_
#define S2ST_AUDIO_MEL_H_

#include <span>
#include <vector>

#include "s2st/audio/stft.h"
#include "s2st/audio/waveform.h"

namespace s2st::audio {

struct FrontendConfig {
  int sample_rate = 16000;
  int n_fft = 400;  // analysis window, samples
  int hop_length = 160;
  int n_mels = kNumMels;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-10;

  // 25 ms window, 10 ms hop, full band.
  static FrontendConfig ForSampleRate(int sample_rate);

  // Smallest power of two that holds the window.
  int fft_size() const;
  StftLayout layout() const { return {n_fft, fft_size(), hop_length}; }

  // Throws InvalidArgumentError when an invariant fails.
  void Validate() const;
};

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters on the FFT bin grid, spaced evenly on the mel scale
// between f_min and f_max. Filters are not area-normalized.
class MelFilterbank {
 public:
  explicit MelFilterbank(const FrontendConfig& cfg);

  int num_mels() const { return num_mels_; }
  int num_bins() const { return num_bins_; }
  double center_hz(int m) const { return centers_hz_[m]; }
  double weight(int m, int bin) const { return weights_[m * num_bins_ + bin]; }
  const std::vector<double>& weights() const { return weights_; }

  // power: num_bins values -> out: num_mels energies.
  void Apply(std::span<const double> power, std::span<double> out) const;

 private:
  int num_mels_;
  int num_bins_;
  std::vector<double> centers_hz_;
  std::vector<double> weights_;  // num_mels x num_bins
};

// log(max(mel_energy, log_floor)) per frame; T = ceil(N / hop). Empty input
// gives T = 0. The waveform rate must equal cfg.sample_rate.
MelSpectrogram ComputeMelSpectrogram(const Waveform& wave, const FrontendConfig& cfg);

}  // namespace s2st::audio

#endif  // S2ST_AUDIO_MEL_H_
