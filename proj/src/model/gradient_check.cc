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

#include "s2st/model/gradient_check.h"

#include <cmath>
#include <vector>

#include "s2st/common/error.h"
#include "s2st/common/phones.h"
#include "s2st/common/random.h"
#include "s2st/model/loss.h"
#include "s2st/model/translatotron.h"

namespace s2st::model {

using nd::Tensor;

ModelGradientReport CheckModelGradients(uint64_t seed, double eps) {
  Translatotron m(ModelConfig::GradCheck(), seed);
  Rng rng(DeriveSeed(seed, {1}));
  for (const auto& e : m.params().entries()) {
    if (!e.trainable) continue;
    for (double& v : Tensor(e.tensor).mutable_leaf_data()) v += rng.Uniform(-0.1, 0.1);
  }
  auto random_mel = [&](int64_t frames) {
    std::vector<double> v(frames * 80);
    for (double& x : v) x = rng.Normal(0.0, 1.0);
    return Tensor::FromData({frames, 80}, std::move(v));
  };
  const Tensor mel = random_mel(10);
  // The spectrogram loss has an L1 term. Target entries are moved at least
  // kMargin away from both predictions so that no central difference
  // straddles its kink. Predictions of a group depend only on earlier
  // target groups, so one pass per group settles every entry.
  constexpr double kMargin = 1e-2;
  std::vector<double> target_values = random_mel(8).values();
  const int64_t groups = 8 / m.config().reduction_factor;
  for (int64_t pass = 0; pass <= groups; ++pass) {
    RunContext ctx;
    nd::NoGradGuard no_grad;
    const EncoderStates enc = m.Encode(mel, PromptCategory::kSecondary, ctx);
    const DecoderOutput out =
        m.DecodeSpectrogram(enc, Tensor::FromData({8, 80}, target_values), ctx);
    bool moved = false;
    for (size_t i = 0; i < target_values.size(); ++i) {
      double& t = target_values[i];
      const double before = out.mel_before.at(static_cast<int64_t>(i));
      const double after = out.mel_after.at(static_cast<int64_t>(i));
      while (std::fabs(t - before) < kMargin || std::fabs(t - after) < kMargin) {
        t += kMargin;
        moved = true;
      }
    }
    if (!moved) break;
    if (pass == groups) throw ContractError("gradient check: target did not settle");
  }
  const Tensor target = Tensor::FromData({8, 80}, std::move(target_values));
  const std::vector<int64_t> in_src = {kBosId, 3, 4, 5}, out_src = {3, 4, 5, kEosId};
  const std::vector<int64_t> in_tgt = {kBosId, 4, 3}, out_tgt = {4, 3, kEosId};
  const auto f = [&] {
    RunContext ctx;
    const EncoderStates enc = m.Encode(mel, PromptCategory::kSecondary, ctx);
    LossAccumulator acc(m.config().label_smoothing, m.config().stop_pos_weight);
    acc.AddSpectrogram(m.DecodeSpectrogram(enc, target, ctx), target, 7,
                       m.config().reduction_factor);
    acc.AddAuxiliary(AuxTask::kSource, m.DecodeAuxiliary(enc, AuxTask::kSource, in_src, ctx),
                     out_src);
    acc.AddAuxiliary(AuxTask::kTarget, m.DecodeAuxiliary(enc, AuxTask::kTarget, in_tgt, ctx),
                     out_tgt);
    return acc.Finish(LossWeights::Full(m.config())).total;
  };
  const std::vector<Tensor> params = m.params().Trainable();
  ModelGradientReport report;
  report.diff = nd::FiniteDiffCheckReport(f, params, eps);
  for (const auto& e : m.params().entries()) {
    if (e.tensor.id() == report.diff.worst_param_id) report.worst_parameter = e.name;
  }
  return report;
}

}  // namespace s2st::model
