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

#include "s2st/audio/stft.h"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "s2st/common/error.h"

namespace s2st::audio {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    forward_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* real() { return real_; }

  void Forward(std::complex<double>* out) {
    fftw_execute(forward_);
    for (int k = 0; k <= n_ / 2; ++k) out[k] = {spec_[k][0], spec_[k][1]};
  }

  // Unnormalized inverse; result lands in real().
  void Inverse(const std::complex<double>* in) {
    for (int k = 0; k <= n_ / 2; ++k) {
      spec_[k][0] = in[k].real();
      spec_[k][1] = in[k].imag();
    }
    fftw_execute(inverse_);
  }

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

void CheckLayout(const StftLayout& layout) {
  if (layout.window_length <= 0 || layout.hop_length <= 0 ||
      layout.fft_size < layout.window_length || layout.hop_length > layout.window_length) {
    throw InvalidArgumentError("stft: invalid layout window=" +
                               std::to_string(layout.window_length) +
                               " fft=" + std::to_string(layout.fft_size) +
                               " hop=" + std::to_string(layout.hop_length));
  }
}

// Maps an index outside [0, n) back into range by mirror reflection
// (excluding the edge sample), repeating as needed for short signals.
int64_t ReflectIndex(int64_t i, int64_t n) {
  if (n == 1) return 0;
  const int64_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  }
  return w;
}

ComplexSpectrogram Stft(std::span<const double> samples, const StftLayout& layout) {
  CheckLayout(layout);
  const int64_t n = static_cast<int64_t>(samples.size());
  ComplexSpectrogram spec;
  spec.num_bins = layout.num_bins();
  spec.num_frames = (n + layout.hop_length - 1) / layout.hop_length;
  if (spec.num_frames == 0) return spec;
  spec.data.resize(spec.num_frames * spec.num_bins);

  const std::vector<double> window = HannWindow(layout.window_length);
  const int64_t half = layout.window_length / 2;
  RealFft fft(layout.fft_size);
  double* buf = fft.real();
  for (int64_t t = 0; t < spec.num_frames; ++t) {
    const int64_t start = t * layout.hop_length - half;
    for (int k = 0; k < layout.window_length; ++k) {
      buf[k] = window[k] * samples[ReflectIndex(start + k, n)];
    }
    for (int k = layout.window_length; k < layout.fft_size; ++k) buf[k] = 0.0;
    fft.Forward(spec.row(t));
  }
  return spec;
}

std::vector<double> Istft(const ComplexSpectrogram& spec, const StftLayout& layout,
                          int64_t length) {
  CheckLayout(layout);
  if (spec.num_bins != layout.num_bins()) {
    throw InvalidArgumentError("istft: spectrogram has " + std::to_string(spec.num_bins) +
                               " bins, layout expects " + std::to_string(layout.num_bins()));
  }
  std::vector<double> out(length, 0.0);
  if (spec.num_frames == 0 || length == 0) return out;

  const std::vector<double> window = HannWindow(layout.window_length);
  const int64_t half = layout.window_length / 2;
  const int64_t padded_len = (spec.num_frames - 1) * layout.hop_length + layout.window_length;
  std::vector<double> acc(padded_len, 0.0), wsum(padded_len, 0.0);
  RealFft fft(layout.fft_size);
  const double scale = 1.0 / layout.fft_size;
  for (int64_t t = 0; t < spec.num_frames; ++t) {
    fft.Inverse(spec.row(t));
    const double* frame = fft.real();
    const int64_t start = t * layout.hop_length;
    for (int k = 0; k < layout.window_length; ++k) {
      acc[start + k] += window[k] * frame[k] * scale;
      wsum[start + k] += window[k] * window[k];
    }
  }
  for (int64_t i = 0; i < length; ++i) {
    const int64_t j = i + half;
    if (j < padded_len && wsum[j] > 1e-8) out[i] = acc[j] / wsum[j];
  }
  return out;
}

}  // namespace s2st::audio
