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

#include "s2st/audio/griffin_lim.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "s2st/audio/stft.h"
#include "s2st/common/error.h"

namespace s2st::audio {

std::vector<double> MelToLinearPower(const MelSpectrogram& mel, const FrontendConfig& cfg,
                                     int nnls_iterations) {
  mel.Validate();
  const MelFilterbank bank(cfg);
  const int bins = bank.num_bins();
  const int mels = bank.num_mels();
  const std::vector<double>& w = bank.weights();
  // Support of each triangle, to skip the zero weights.
  std::vector<int> lo(mels, bins), hi(mels, 0);
  for (int m = 0; m < mels; ++m) {
    for (int k = 0; k < bins; ++k) {
      if (w[m * bins + k] != 0.0) {
        lo[m] = std::min(lo[m], k);
        hi[m] = k + 1;
      }
    }
  }
  std::vector<double> power(mel.num_frames * bins, 0.0);
  std::vector<double> target(mels), numer(bins), denom(bins), approx(mels);
  for (int64_t t = 0; t < mel.num_frames; ++t) {
    for (int m = 0; m < mels; ++m) {
      const double e = std::exp(static_cast<double>(mel.at(t, m)));
      target[m] = e <= cfg.log_floor * 1.0001 ? 0.0 : e;
    }
    double* s = power.data() + t * bins;
    std::fill(numer.begin(), numer.end(), 0.0);
    for (int m = 0; m < mels; ++m) {
      for (int k = lo[m]; k < hi[m]; ++k) numer[k] += w[m * bins + k] * target[m];
    }
    std::copy(numer.begin(), numer.end(), s);
    for (int it = 0; it < nnls_iterations; ++it) {
      for (int m = 0; m < mels; ++m) {
        double acc = 0.0;
        for (int k = lo[m]; k < hi[m]; ++k) acc += w[m * bins + k] * s[k];
        approx[m] = acc;
      }
      std::fill(denom.begin(), denom.end(), 0.0);
      for (int m = 0; m < mels; ++m) {
        for (int k = lo[m]; k < hi[m]; ++k) denom[k] += w[m * bins + k] * approx[m];
      }
      for (int k = 0; k < bins; ++k) {
        if (s[k] != 0.0) s[k] *= numer[k] / (denom[k] + 1e-30);
      }
    }
  }
  return power;
}

Waveform GriffinLimInvert(const MelSpectrogram& mel, const FrontendConfig& cfg, int iterations) {
  if (iterations < 0) {
    throw InvalidArgumentError("griffin_lim: iterations must be >= 0, got " +
                               std::to_string(iterations));
  }
  cfg.Validate();
  mel.Validate();
  Waveform out;
  out.sample_rate = cfg.sample_rate;
  if (mel.num_frames == 0) return out;

  const StftLayout layout = cfg.layout();
  const int bins = layout.num_bins();
  const int64_t length = mel.num_frames * cfg.hop_length;
  const std::vector<double> power = MelToLinearPower(mel, cfg);

  ComplexSpectrogram spec;
  spec.num_frames = mel.num_frames;
  spec.num_bins = bins;
  spec.data.resize(power.size());
  std::vector<double> magnitude(power.size());
  for (size_t i = 0; i < power.size(); ++i) {
    magnitude[i] = std::sqrt(power[i]);
    spec.data[i] = magnitude[i];
  }
  std::vector<double> signal = Istft(spec, layout, length);
  for (int it = 0; it < iterations; ++it) {
    const ComplexSpectrogram rebuilt = Stft(signal, layout);
    for (size_t i = 0; i < spec.data.size(); ++i) {
      const double a = std::abs(rebuilt.data[i]);
      spec.data[i] = a > 1e-12 ? rebuilt.data[i] * (magnitude[i] / a)
                               : std::complex<double>(magnitude[i], 0.0);
    }
    signal = Istft(spec, layout, length);
  }
  out.samples.resize(length);
  for (int64_t i = 0; i < length; ++i) out.samples[i] = static_cast<float>(signal[i]);
  return out;
}

}  // namespace s2st::audio
