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

#include "s2st/audio/mel.h"

#include <cmath>
#include <string>

#include "s2st/common/error.h"

namespace s2st::audio {

FrontendConfig FrontendConfig::ForSampleRate(int sample_rate) {
  if (sample_rate <= 0) {
    throw InvalidArgumentError("sample rate must be positive, got " + std::to_string(sample_rate));
  }
  FrontendConfig cfg;
  cfg.sample_rate = sample_rate;
  cfg.n_fft = static_cast<int>(std::lround(0.025 * sample_rate));
  cfg.hop_length = static_cast<int>(std::lround(0.010 * sample_rate));
  cfg.f_min = 0.0;
  cfg.f_max = sample_rate / 2.0;
  return cfg;
}

int FrontendConfig::fft_size() const {
  int n = 1;
  while (n < n_fft) n <<= 1;
  return n;
}

void FrontendConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw InvalidArgumentError("frontend config: " + what);
  };
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (n_fft <= 0 || hop_length <= 0) fail("n_fft and hop_length must be positive");
  if (hop_length > n_fft) fail("hop_length must not exceed n_fft");
  if (n_mels != kNumMels) fail("n_mels must be 80");
  if (f_min < 0.0 || f_max <= f_min) fail("need 0 <= f_min < f_max");
  if (f_max > sample_rate / 2.0 + 1e-9) fail("f_max must not exceed sample_rate/2");
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(const FrontendConfig& cfg)
    : num_mels_(cfg.n_mels), num_bins_(cfg.fft_size() / 2 + 1) {
  cfg.Validate();
  const double mel_lo = HzToMel(cfg.f_min);
  const double mel_hi = HzToMel(cfg.f_max);
  std::vector<double> edges(num_mels_ + 2);
  for (int i = 0; i < num_mels_ + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (num_mels_ + 1));
  }
  centers_hz_.assign(edges.begin() + 1, edges.end() - 1);
  weights_.assign(static_cast<size_t>(num_mels_) * num_bins_, 0.0);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.fft_size();
  for (int m = 0; m < num_mels_; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < num_bins_; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      weights_[m * num_bins_ + k] = w;
    }
  }
}

void MelFilterbank::Apply(std::span<const double> power, std::span<double> out) const {
  for (int m = 0; m < num_mels_; ++m) {
    const double* w = weights_.data() + m * num_bins_;
    double acc = 0.0;
    for (int k = 0; k < num_bins_; ++k) acc += w[k] * power[k];
    out[m] = acc;
  }
}

MelSpectrogram ComputeMelSpectrogram(const Waveform& wave, const FrontendConfig& cfg) {
  cfg.Validate();
  ValidateWaveform(wave);
  if (wave.sample_rate != cfg.sample_rate) {
    throw InvalidArgumentError("mel_spectrogram: waveform rate " +
                               std::to_string(wave.sample_rate) + " differs from config rate " +
                               std::to_string(cfg.sample_rate));
  }
  MelSpectrogram mel;
  mel.sample_rate = cfg.sample_rate;
  mel.hop_length = cfg.hop_length;
  const std::vector<double> samples(wave.samples.begin(), wave.samples.end());
  const ComplexSpectrogram spec = Stft(samples, cfg.layout());
  mel.num_frames = spec.num_frames;
  mel.data.resize(mel.num_frames * kNumMels);

  const MelFilterbank bank(cfg);
  std::vector<double> power(spec.num_bins), energies(kNumMels);
  for (int64_t t = 0; t < spec.num_frames; ++t) {
    const std::complex<double>* row = spec.row(t);
    for (int k = 0; k < spec.num_bins; ++k) power[k] = std::norm(row[k]);
    bank.Apply(power, energies);
    for (int m = 0; m < kNumMels; ++m) {
      mel.at(t, m) = static_cast<float>(std::log(std::max(energies[m], cfg.log_floor)));
    }
  }
  return mel;
}

}  // namespace s2st::audio
