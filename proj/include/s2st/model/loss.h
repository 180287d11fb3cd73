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

#ifndef S2ST_MODEL_LOSS_H_
#define S2ST_MODEL_LOSS_H_

#include <span>
#include <vector>

#include "s2st/model/translatotron.h"
#include "s2st/nd/tensor.h"

namespace s2st::model {

struct LossBreakdown {
  double spec_loss = 0.0;
  double stop_loss = 0.0;
  double aux_src_loss = 0.0;
  double aux_tgt_loss = 0.0;
  double total = 0.0;
};

// Multipliers of the four terms in the total. The full objective uses
// {1, 1, w_src, w_tgt}; pre-training uses {0, 0, 0.5, 0.5}.
struct LossWeights {
  double spec = 1.0;
  double stop = 1.0;
  double aux_src = 0.3;
  double aux_tgt = 0.3;

  static LossWeights Full(const ModelConfig& c) { return {1.0, 1.0, c.w_src, c.w_tgt}; }
  static LossWeights Pretrain() { return {0.0, 0.0, 0.5, 0.5}; }
};

// Pools per-utterance loss sums over a batch; each term is its pooled sum
// divided by its pooled count (unpadded frame entries, decoder steps, or
// target tokens).
class LossAccumulator {
 public:
  LossAccumulator(double label_smoothing, double stop_pos_weight)
      : label_smoothing_(label_smoothing), stop_pos_weight_(stop_pos_weight) {}

  // target: (steps * r, 80); only the first valid_frames rows count. The
  // stop target of a step is 1 from the step holding the last valid frame on.
  void AddSpectrogram(const DecoderOutput& out, const nd::Tensor& target, int64_t valid_frames,
                      int reduction_factor);

  // logits: (L, vocab); targets: L ids, kPadId entries are ignored.
  void AddAuxiliary(AuxTask which, const nd::Tensor& logits, std::span<const int64_t> targets);

  struct Result {
    nd::Tensor total;  // scalar graph node for backward
    LossBreakdown breakdown;
  };
  // Terms with zero weight may be absent. Throws DegenerateBatchError when
  // every weighted term is empty.
  Result Finish(const LossWeights& weights) const;

 private:
  struct Term {
    nd::Tensor sum;
    double count = 0.0;
    void Add(const nd::Tensor& s, double n);
  };

  double label_smoothing_;
  double stop_pos_weight_;
  Term spec_, stop_, aux_src_, aux_tgt_;
};

// Teacher-forced aux decoder inputs and targets for a phone sequence without
// specials: inputs = [BOS, p...], targets = [p..., EOS].
void MakeAuxSequences(std::span<const int64_t> phones, std::vector<int64_t>* inputs,
                      std::vector<int64_t>* targets);

}  // namespace s2st::model

#endif  // S2ST_MODEL_LOSS_H_
