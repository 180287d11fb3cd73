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

#include "s2st/audio/cmvn.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "s2st/common/error.h"

namespace s2st::audio {

namespace {

void CheckStats(const CmvnStats& stats) {
  if (stats.mean.size() != kNumMels || stats.var.size() != kNumMels) {
    throw InvalidArgumentError("cmvn: stats must have 80 channels");
  }
  for (int c = 0; c < kNumMels; ++c) {
    if (!(stats.var[c] > 0.0) || !std::isfinite(stats.var[c]) || !std::isfinite(stats.mean[c])) {
      throw InvalidArgumentError("cmvn: invalid stats, variance of channel " + std::to_string(c) +
                                 " is " + std::to_string(stats.var[c]));
    }
  }
}

}  // namespace

void CmvnAccumulator::Add(const MelSpectrogram& mel) {
  mel.Validate();
  for (int64_t t = 0; t < mel.num_frames; ++t) {
    for (int c = 0; c < kNumMels; ++c) {
      const double v = mel.at(t, c);
      sum_[c] += v;
      sum_sq_[c] += v * v;
    }
  }
  frames_ += mel.num_frames;
}

CmvnStats CmvnAccumulator::Finish(double var_floor) const {
  if (frames_ == 0) throw InvalidArgumentError("cmvn: no frames accumulated");
  CmvnStats stats;
  for (int c = 0; c < kNumMels; ++c) {
    const double mean = sum_[c] / frames_;
    stats.mean[c] = mean;
    stats.var[c] = std::max(sum_sq_[c] / frames_ - mean * mean, var_floor);
  }
  return stats;
}

CmvnStats ComputeCmvnStats(std::span<const MelSpectrogram> mels, double var_floor) {
  CmvnAccumulator acc;
  for (const MelSpectrogram& m : mels) acc.Add(m);
  return acc.Finish(var_floor);
}

MelSpectrogram CmvnNormalize(const MelSpectrogram& mel, const CmvnStats& stats) {
  CheckStats(stats);
  mel.Validate();
  MelSpectrogram out = mel;
  for (int c = 0; c < kNumMels; ++c) {
    const double inv_sd = 1.0 / std::sqrt(stats.var[c]);
    for (int64_t t = 0; t < mel.num_frames; ++t) {
      out.at(t, c) = static_cast<float>((mel.at(t, c) - stats.mean[c]) * inv_sd);
    }
  }
  return out;
}

MelSpectrogram CmvnDenormalize(const MelSpectrogram& mel, const CmvnStats& stats) {
  CheckStats(stats);
  mel.Validate();
  MelSpectrogram out = mel;
  for (int c = 0; c < kNumMels; ++c) {
    const double sd = std::sqrt(stats.var[c]);
    for (int64_t t = 0; t < mel.num_frames; ++t) {
      out.at(t, c) = static_cast<float>(mel.at(t, c) * sd + stats.mean[c]);
    }
  }
  return out;
}

}  // namespace s2st::audio
