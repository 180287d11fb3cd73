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

#include "s2st/audio/resample.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "s2st/common/error.h"

namespace s2st::audio {

namespace {

constexpr int kZeroCrossings = 16;
constexpr double kRolloff = 0.94;
constexpr double kKaiserBeta = 8.6;

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double Kaiser(double x, double beta) {
  // x in [-1, 1]
  const double r = 1.0 - x * x;
  if (r <= 0.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(r)) / std::cyl_bessel_i(0.0, beta);
}

// Taps of one polyphase branch. `frac` is the fractional input position of
// the output sample, `cutoff` the normalized cutoff in cycles per input sample
// times two (1 = Nyquist of the input).
std::vector<double> BranchTaps(double frac, double cutoff, int half_width) {
  std::vector<double> taps(2 * half_width);
  for (int k = 0; k < 2 * half_width; ++k) {
    const double x = static_cast<double>(k - half_width + 1) - frac;
    const double w = Kaiser(x / (half_width + 1.0), kKaiserBeta);
    taps[k] = cutoff * Sinc(cutoff * x) * w;
  }
  return taps;
}

}  // namespace

Waveform Resample(const Waveform& wave, int target_sr) {
  if (target_sr <= 0) {
    throw InvalidArgumentError("resample: target rate must be positive, got " +
                               std::to_string(target_sr));
  }
  ValidateWaveform(wave);
  if (target_sr == wave.sample_rate) return wave;

  const int64_t g = std::gcd(static_cast<int64_t>(target_sr), static_cast<int64_t>(wave.sample_rate));
  const int64_t up = target_sr / g;
  const int64_t down = wave.sample_rate / g;
  const double cutoff = kRolloff * std::min(1.0, static_cast<double>(up) / down);
  const int half_width = static_cast<int>(std::ceil(kZeroCrossings / cutoff));

  const int64_t n_in = static_cast<int64_t>(wave.samples.size());
  const int64_t n_out = (n_in * up + down - 1) / down;

  // Output sample n sits at input position n*down/up = base + phase/up.
  const bool cache_branches = up <= 4096;
  std::vector<std::vector<double>> branches;
  if (cache_branches) {
    branches.resize(up);
    for (int64_t p = 0; p < up; ++p) {
      branches[p] = BranchTaps(static_cast<double>(p) / up, cutoff, half_width);
    }
  }

  Waveform out;
  out.sample_rate = target_sr;
  out.samples.resize(n_out);
  std::vector<double> scratch;
  for (int64_t n = 0; n < n_out; ++n) {
    const int64_t pos = n * down;
    const int64_t base = pos / up;
    const int64_t phase = pos % up;
    const std::vector<double>* taps;
    if (cache_branches) {
      taps = &branches[phase];
    } else {
      scratch = BranchTaps(static_cast<double>(phase) / up, cutoff, half_width);
      taps = &scratch;
    }
    double acc = 0.0;
    for (int k = 0; k < 2 * half_width; ++k) {
      const int64_t i = base + k - half_width + 1;
      if (i < 0 || i >= n_in) continue;
      acc += (*taps)[k] * wave.samples[i];
    }
    out.samples[n] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace s2st::audio
