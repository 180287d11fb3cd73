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

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "s2st/audio/cmvn.h"
#include "s2st/audio/griffin_lim.h"
#include "s2st/audio/mel.h"
#include "s2st/audio/mel_io.h"
#include "s2st/audio/resample.h"
#include "s2st/audio/spec_augment.h"
#include "s2st/audio/wav_io.h"
#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/common/random.h"

using namespace s2st;
using namespace s2st::audio;

namespace {

Waveform Tone(double hz, int sr, int64_t n, double amp = 0.5) {
  Waveform w;
  w.sample_rate = sr;
  w.samples.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    w.samples[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * i / sr));
  }
  return w;
}

// Frequency of the largest-magnitude bin of a direct O(N^2) DFT, searched up
// to max_hz. Resolution is sr / N.
double DominantFrequency(const std::vector<float>& x, int sr, double max_hz) {
  const size_t n = x.size();
  const size_t kmax = std::min(n / 2, static_cast<size_t>(max_hz * n / sr));
  double best = -1.0;
  size_t best_k = 0;
  for (size_t k = 1; k <= kmax; ++k) {
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * i) % n) / n;
      acc += static_cast<double>(x[i]) * std::polar(1.0, phase);
    }
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      best_k = k;
    }
  }
  return static_cast<double>(best_k) * sr / n;
}

MelSpectrogram RandomMel(int64_t frames, uint64_t seed) {
  Rng rng(seed);
  MelSpectrogram m;
  m.num_frames = frames;
  m.sample_rate = 8000;
  m.hop_length = 80;
  m.data.resize(frames * kNumMels);
  for (float& v : m.data) v = static_cast<float>(rng.Normal(-3.0, 2.0));
  return m;
}

double Pearson(const std::vector<float>& a, const std::vector<float>& b) {
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("s2st_audio_test_" + name);
}

}  // namespace

TEST_CASE("resample to the same rate is the identity") {
  const Waveform w = Tone(300.0, 16000, 1234);
  const Waveform r = Resample(w, 16000);
  CHECK(r.sample_rate == 16000);
  CHECK(r.samples == w.samples);
}

TEST_CASE("resampled silence stays silent") {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(16000, 0.0f);
  const Waveform r = Resample(w, 8000);
  REQUIRE(r.samples.size() == 8000);
  for (float v : r.samples) CHECK(v == 0.0f);
}

TEST_CASE("440 Hz survives 16k to 8k downsampling") {
  const Waveform r = Resample(Tone(440.0, 16000, 16000), 8000);
  REQUIRE(r.samples.size() == 8000);
  CHECK(DominantFrequency(r.samples, 8000, 4000.0) == doctest::Approx(440.0));
}

TEST_CASE("resample rejects non-positive rates and preserves duration") {
  const Waveform w = Tone(200.0, 16000, 1001);
  CHECK_THROWS_AS(Resample(w, 0), InvalidArgumentError);
  CHECK_THROWS_AS(Resample(w, -8000), InvalidArgumentError);
  for (int sr : {8000, 22050, 24000, 44100}) {
    const Waveform r = Resample(w, sr);
    CHECK(std::abs(r.duration_seconds() - w.duration_seconds()) <= 1.0 / sr);
    const Waveform rr = Resample(r, sr);
    CHECK(rr.samples == r.samples);
  }
}

TEST_CASE("upsampling keeps a tone's frequency") {
  const Waveform r = Resample(Tone(1000.0, 8000, 4000), 24000);
  REQUIRE(r.samples.size() == 12000);
  CHECK(DominantFrequency(r.samples, 24000, 3000.0) == doctest::Approx(1000.0));
}

TEST_CASE("one second of silence maps every entry to the log floor") {
  Waveform w;
  w.sample_rate = 8000;
  w.samples.assign(8000, 0.0f);
  const FrontendConfig cfg = FrontendConfig::ForSampleRate(8000);
  REQUIRE(cfg.hop_length == 80);
  const MelSpectrogram m = ComputeMelSpectrogram(w, cfg);
  CHECK(m.num_frames == 100);
  CHECK(m.data.size() == 100u * 80u);
  const float floor_value = static_cast<float>(std::log(1e-10));
  for (float v : m.data) CHECK(v == floor_value);
}

TEST_CASE("frame count is ceil(N / hop)") {
  const FrontendConfig cfg = FrontendConfig::ForSampleRate(8000);
  Waveform w;
  w.sample_rate = 8000;
  w.samples.assign(800, 0.1f);
  CHECK(ComputeMelSpectrogram(w, cfg).num_frames == 10);
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t n = rng.UniformInt(1, 3000);
    Waveform x = Tone(123.0, 8000, n);
    CHECK(ComputeMelSpectrogram(x, cfg).num_frames == (n + 79) / 80);
  }
  w.samples.clear();
  CHECK(ComputeMelSpectrogram(w, cfg).num_frames == 0);
}

TEST_CASE("a 1 kHz tone peaks in the mel bin centered nearest 1 kHz") {
  const FrontendConfig cfg = FrontendConfig::ForSampleRate(16000);
  const MelSpectrogram m = ComputeMelSpectrogram(Tone(1000.0, 16000, 16000), cfg);
  std::vector<double> mean(kNumMels, 0.0);
  for (int64_t t = 0; t < m.num_frames; ++t) {
    for (int c = 0; c < kNumMels; ++c) mean[c] += m.at(t, c);
  }
  int argmax = 0;
  for (int c = 1; c < kNumMels; ++c) {
    if (mean[c] > mean[argmax]) argmax = c;
  }
  // Independent HTK center frequencies: 82 points evenly spaced in mel.
  const double top = 2595.0 * std::log10(1.0 + 8000.0 / 700.0);
  int expected = 0;
  double best = 1e300;
  for (int c = 0; c < kNumMels; ++c) {
    const double center = 700.0 * (std::pow(10.0, top * (c + 1) / 81.0 / 2595.0) - 1.0);
    if (std::abs(center - 1000.0) < best) {
      best = std::abs(center - 1000.0);
      expected = c;
    }
  }
  CHECK(argmax == expected);
}

TEST_CASE("frontend config validation") {
  FrontendConfig cfg = FrontendConfig::ForSampleRate(24000);
  CHECK(cfg.n_fft == 600);
  CHECK(cfg.hop_length == 240);
  CHECK(cfg.fft_size() == 1024);
  cfg.f_max = 13000;
  CHECK_THROWS_AS(cfg.Validate(), InvalidArgumentError);
  cfg = FrontendConfig::ForSampleRate(24000);
  cfg.hop_length = 700;
  CHECK_THROWS_AS(cfg.Validate(), InvalidArgumentError);
}

TEST_CASE("spec_augment with a zero policy is the identity") {
  const MelSpectrogram m = RandomMel(30, 1);
  const MelSpectrogram out = SpecAugment(m, SpecAugmentPolicy::Disabled(), 99);
  CHECK(out.data == m.data);
}

TEST_CASE("a single full-width frequency mask zeroes whole columns only") {
  MelSpectrogram m;
  m.num_frames = 10;
  m.data.assign(10 * 80, 1.0f);
  SpecAugmentPolicy p = SpecAugmentPolicy::Disabled();
  p.n_freq_masks = 1;
  p.freq_mask_width_max = 80;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const MelSpectrogram out = SpecAugment(m, p, seed);
    int zero_columns = 0;
    for (int c = 0; c < 80; ++c) {
      int zeros = 0;
      for (int64_t t = 0; t < 10; ++t) {
        const float v = out.at(t, c);
        CHECK((v == 0.0f || v == 1.0f));
        zeros += v == 0.0f;
      }
      CHECK((zeros == 0 || zeros == 10));
      zero_columns += zeros == 10;
    }
    CHECK(zero_columns >= 0);
    CHECK(zero_columns <= 80);
  }
}

TEST_CASE("spec_augment is deterministic and respects the mass bound") {
  const SpecAugmentPolicy p;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const MelSpectrogram m = RandomMel(40 + static_cast<int64_t>(seed) * 7, seed + 100);
    const MelSpectrogram a = SpecAugment(m, p, seed);
    const MelSpectrogram b = SpecAugment(m, p, seed);
    CHECK(a.data == b.data);
    int64_t changed = 0;
    for (size_t i = 0; i < m.data.size(); ++i) changed += a.data[i] != m.data[i];
    const int64_t bound = static_cast<int64_t>(p.n_freq_masks) * p.freq_mask_width_max * m.num_frames +
                          static_cast<int64_t>(p.n_time_masks) * p.time_mask_width_max * 80;
    CHECK(changed <= bound);
  }
}

TEST_CASE("cmvn identity and constant cases") {
  const MelSpectrogram m = RandomMel(5, 3);
  CmvnStats unit;
  CHECK(CmvnNormalize(m, unit).data == m.data);

  MelSpectrogram c;
  c.num_frames = 4;
  c.data.assign(4 * 80, 5.0f);
  CmvnStats s;
  s.mean.assign(80, 5.0);
  s.var.assign(80, 4.0);
  for (float v : CmvnNormalize(c, s).data) CHECK(v == 0.0f);

  s.var[7] = 0.0;
  CHECK_THROWS_AS(CmvnNormalize(c, s), InvalidArgumentError);
}

TEST_CASE("self-normalized spectrogram has zero mean and unit variance per channel") {
  const MelSpectrogram m = RandomMel(20, 8);
  const MelSpectrogram single[] = {m};
  const MelSpectrogram out = CmvnNormalize(m, ComputeCmvnStats(single));
  for (int c = 0; c < kNumMels; ++c) {
    double sum = 0.0, sq = 0.0;
    for (int64_t t = 0; t < 20; ++t) sum += out.at(t, c);
    const double mean = sum / 20;
    for (int64_t t = 0; t < 20; ++t) sq += (out.at(t, c) - mean) * (out.at(t, c) - mean);
    CHECK(std::abs(mean) < 1e-6);
    CHECK(sq / 20 == doctest::Approx(1.0).epsilon(1e-5));
  }
  const MelSpectrogram back = CmvnDenormalize(out, ComputeCmvnStats(single));
  for (size_t i = 0; i < m.data.size(); ++i) CHECK(back.data[i] == doctest::Approx(m.data[i]).epsilon(1e-5));
}

TEST_CASE("griffin_lim on an empty spectrogram gives an empty waveform") {
  MelSpectrogram m;
  m.sample_rate = 16000;
  m.hop_length = 160;
  const Waveform w = GriffinLimInvert(m, FrontendConfig::ForSampleRate(16000), 10);
  CHECK(w.samples.empty());
  CHECK_THROWS_AS(GriffinLimInvert(m, FrontendConfig::ForSampleRate(16000), -1),
                  InvalidArgumentError);
}

TEST_CASE("griffin_lim recovers the frequency of a 500 Hz tone") {
  const FrontendConfig cfg = FrontendConfig::ForSampleRate(16000);
  const MelSpectrogram m = ComputeMelSpectrogram(Tone(500.0, 16000, 8000), cfg);
  const Waveform w = GriffinLimInvert(m, cfg, 60);
  REQUIRE(w.samples.size() == static_cast<size_t>(m.num_frames * cfg.hop_length));
  const double bin_hz = 16000.0 / cfg.fft_size();
  CHECK(std::abs(DominantFrequency(w.samples, 16000, 4000.0) - 500.0) <= bin_hz);
}

TEST_CASE("griffin_lim with zero iterations still has the right length") {
  const FrontendConfig cfg = FrontendConfig::ForSampleRate(8000);
  const MelSpectrogram m = ComputeMelSpectrogram(Tone(700.0, 8000, 1000), cfg);
  const Waveform w = GriffinLimInvert(m, cfg, 0);
  CHECK(w.samples.size() == static_cast<size_t>(m.num_frames * 80));
  for (float v : w.samples) CHECK(std::isfinite(v));
}

TEST_CASE("griffin_lim round trip correlates with the original log-mel") {
  const int sr = 16000;
  const FrontendConfig cfg = FrontendConfig::ForSampleRate(sr);
  Waveform w;
  w.sample_rate = sr;
  w.samples.resize(sr);
  // Gliding two-tone signal with a slow amplitude envelope.
  for (int i = 0; i < sr; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double f1 = 300.0 + 400.0 * t;
    const double env = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * 3.0 * t);
    w.samples[i] = static_cast<float>(
        env * (0.3 * std::sin(2.0 * std::numbers::pi * (300.0 * t + 200.0 * t * t)) +
               0.2 * std::sin(2.0 * std::numbers::pi * 2.5 * f1 * t)));
  }
  const MelSpectrogram m = ComputeMelSpectrogram(w, cfg);
  const Waveform back = GriffinLimInvert(m, cfg, 60);
  const MelSpectrogram m2 = ComputeMelSpectrogram(back, cfg);
  REQUIRE(m2.num_frames == m.num_frames);
  CHECK(Pearson(m.data, m2.data) > 0.8);
}

TEST_CASE("mel files round-trip and reject truncation") {
  MelSpectrogram m = RandomMel(7, 2);
  const auto path = TempPath("a.mel");
  WriteMel(path, m);
  const MelSpectrogram r = ReadMel(path);
  CHECK(r.num_frames == 7);
  CHECK(r.sample_rate == 8000);
  CHECK(r.hop_length == 80);
  CHECK(r.data == m.data);
  std::string bytes = ReadFileBytes(path);
  CHECK(bytes.substr(0, 8) == "S2STMEL1");
  CHECK(bytes.size() == 8 + 16 + 7 * 80 * 4);
  bytes.resize(bytes.size() - 3);
  WriteFileBytes(path, bytes);
  CHECK_THROWS_AS(ReadMel(path), IntegrityError);
  std::filesystem::remove(path);
}

TEST_CASE("wav files round-trip in float and 16-bit PCM") {
  const Waveform w = Tone(440.0, 24000, 500);
  const auto path = TempPath("a.wav");
  WriteWav(path, w);
  const Waveform f = ReadWav(path);
  CHECK(f.sample_rate == 24000);
  CHECK(f.samples == w.samples);
  CHECK(WavDurationSeconds(path) == doctest::Approx(500.0 / 24000.0));
  WriteWav(path, w, WavEncoding::kPcm16);
  const Waveform p = ReadWav(path);
  REQUIRE(p.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) CHECK(std::abs(p.samples[i] - w.samples[i]) < 1e-4);
  WriteFileBytes(path, "RIFFxxxxWAVEjunk");
  CHECK_THROWS_AS(ReadWav(path), ParseError);
  std::filesystem::remove(path);
}
