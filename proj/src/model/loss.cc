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

#include "s2st/model/loss.h"

#include <string>

#include "s2st/common/error.h"
#include "s2st/common/phones.h"
#include "s2st/nd/ops.h"

namespace s2st::model {

using nd::Tensor;

void LossAccumulator::Term::Add(const Tensor& s, double n) {
  sum = sum.defined() ? nd::Add(sum, s) : s;
  count += n;
}

void MakeAuxSequences(std::span<const int64_t> phones, std::vector<int64_t>* inputs,
                      std::vector<int64_t>* targets) {
  inputs->assign(1, kBosId);
  inputs->insert(inputs->end(), phones.begin(), phones.end());
  targets->assign(phones.begin(), phones.end());
  targets->push_back(kEosId);
}

void LossAccumulator::AddSpectrogram(const DecoderOutput& out, const Tensor& target,
                                     int64_t valid_frames, int reduction_factor) {
  const int64_t frames = target.dim(0);
  if (out.mel_before.shape() != target.shape() || out.mel_after.shape() != target.shape()) {
    throw ShapeError("spectrogram loss: prediction " + nd::ShapeToString(out.mel_before.shape()) +
                     " vs target " + nd::ShapeToString(target.shape()));
  }
  if (valid_frames < 0 || valid_frames > frames) {
    throw ContractError("spectrogram loss: valid_frames out of range");
  }
  if (valid_frames == 0) return;
  std::vector<double> mask(frames * 80, 0.0);
  std::fill(mask.begin(), mask.begin() + valid_frames * 80, 1.0);
  const Tensor m = Tensor::FromData({frames, 80}, std::move(mask));
  auto l1_l2 = [&](const Tensor& pred) {
    const Tensor d = nd::Mul(nd::Sub(pred, target), m);
    return nd::Add(nd::Sum(nd::Abs(d)), nd::Sum(nd::Mul(d, d)));
  };
  spec_.Add(nd::Add(l1_l2(out.mel_before), l1_l2(out.mel_after)),
            static_cast<double>(valid_frames * 80));

  // Weighted BCE: pw * y * softplus(-z) + (1 - y) * softplus(z).
  const int64_t steps = out.steps;
  const int64_t last_step = (valid_frames - 1) / reduction_factor;
  std::vector<double> pos(steps, 0.0), neg(steps, 0.0);
  for (int64_t s = 0; s < steps; ++s) {
    if (s >= last_step) {
      pos[s] = stop_pos_weight_;
    } else {
      neg[s] = 1.0;
    }
  }
  const Tensor z = out.stop_logits;
  const Tensor bce =
      nd::Add(nd::Sum(nd::Mul(nd::Softplus(nd::Scale(z, -1.0)), Tensor::FromData({steps}, pos))),
              nd::Sum(nd::Mul(nd::Softplus(z), Tensor::FromData({steps}, neg))));
  stop_.Add(bce, static_cast<double>(steps));
}

void LossAccumulator::AddAuxiliary(AuxTask which, const Tensor& logits,
                                   std::span<const int64_t> targets) {
  const int64_t length = logits.dim(0);
  const int64_t vocab = logits.dim(1);
  if (static_cast<int64_t>(targets.size()) != length) {
    throw ShapeError("aux loss: " + std::to_string(targets.size()) + " targets for " +
                     std::to_string(length) + " logit rows");
  }
  std::vector<double> q(length * vocab, 0.0);
  int64_t tokens = 0;
  const double eps = label_smoothing_;
  for (int64_t i = 0; i < length; ++i) {
    const int64_t t = targets[i];
    if (t == kPadId) continue;
    if (t < 0 || t >= vocab) {
      throw VocabError("aux loss: target id " + std::to_string(t) + " outside vocabulary of " +
                       std::to_string(vocab));
    }
    for (int64_t v = 0; v < vocab; ++v) q[i * vocab + v] = eps / vocab;
    q[i * vocab + t] += 1.0 - eps;
    ++tokens;
  }
  if (tokens == 0) return;
  const Tensor ce = nd::Scale(
      nd::Sum(nd::Mul(nd::LogSoftmax(logits), Tensor::FromData({length, vocab}, std::move(q)))),
      -1.0);
  (which == AuxTask::kSource ? aux_src_ : aux_tgt_).Add(ce, static_cast<double>(tokens));
}

LossAccumulator::Result LossAccumulator::Finish(const LossWeights& w) const {
  Result result;
  Tensor total;
  bool any = false;
  auto add = [&](const Term& term, double weight, double* report) {
    if (term.count == 0.0) return;
    const Tensor mean = nd::Scale(term.sum, 1.0 / term.count);
    *report = mean.item();
    if (weight == 0.0) return;
    const Tensor weighted = nd::Scale(mean, weight);
    total = total.defined() ? nd::Add(total, weighted) : weighted;
    any = true;
  };
  add(spec_, w.spec, &result.breakdown.spec_loss);
  add(stop_, w.stop, &result.breakdown.stop_loss);
  add(aux_src_, w.aux_src, &result.breakdown.aux_src_loss);
  add(aux_tgt_, w.aux_tgt, &result.breakdown.aux_tgt_loss);
  if (!any) throw DegenerateBatchError("loss: every weighted term is empty (all-pad batch)");
  result.total = total;
  result.breakdown.total = total.item();
  return result;
}

}  // namespace s2st::model
