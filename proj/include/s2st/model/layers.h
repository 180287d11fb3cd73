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

#ifndef S2ST_MODEL_LAYERS_H_
#define S2ST_MODEL_LAYERS_H_

#include <string>
#include <vector>

#include "s2st/common/random.h"
#include "s2st/nd/attention.h"
#include "s2st/nd/ops.h"
#include "s2st/nd/parameters.h"

namespace s2st::model {

// Per-forward switches. Dropout draws come from `rng`, which must be set
// whenever training is true and some rate is positive.
struct RunContext {
  bool training = false;
  Rng* rng = nullptr;
  double dropout = 0.0;
  double prenet_dropout = 0.0;

  static RunContext Inference() { return {}; }
};

struct Linear {
  nd::Tensor w;  // (in, out)
  nd::Tensor b;  // (out) or undefined

  static Linear Create(nd::ParameterSet& ps, const std::string& name, int64_t in, int64_t out,
                       Rng& rng, bool bias = true);
  nd::Tensor operator()(const nd::Tensor& x) const;
};

struct LayerNormParams {
  nd::Tensor gain, bias;

  static LayerNormParams Create(nd::ParameterSet& ps, const std::string& name, int64_t dim,
                                Rng& rng);
  nd::Tensor operator()(const nd::Tensor& x) const;
};

struct FeedForward {
  Linear in, out;

  static FeedForward Create(nd::ParameterSet& ps, const std::string& name, int64_t dim,
                            int64_t hidden, Rng& rng);
  nd::Tensor operator()(const nd::Tensor& x, RunContext& ctx) const;
};

// Pre-LN self-attention block plus feed-forward.
struct EncoderLayer {
  LayerNormParams ln_attn, ln_ffn;
  nd::AttentionParams attn;
  FeedForward ffn;

  static EncoderLayer Create(nd::ParameterSet& ps, const std::string& name, int64_t dim,
                             int64_t heads, int64_t ffn_dim, Rng& rng);
  nd::Tensor operator()(const nd::Tensor& x, const nd::AttentionMask& mask,
                        RunContext& ctx) const;
};

// Pre-LN causal self-attention, cross-attention to a memory, feed-forward.
struct DecoderLayer {
  LayerNormParams ln_self, ln_cross, ln_ffn;
  nd::AttentionParams self_attn, cross_attn;
  FeedForward ffn;

  static DecoderLayer Create(nd::ParameterSet& ps, const std::string& name, int64_t dim,
                             int64_t memory_dim, int64_t heads, int64_t ffn_dim, Rng& rng);
  nd::Tensor operator()(const nd::Tensor& x, const nd::Tensor& memory, RunContext& ctx) const;
};

nd::Tensor ApplyDropout(const nd::Tensor& x, double p, RunContext& ctx);

}  // namespace s2st::model

#endif  // S2ST_MODEL_LAYERS_H_
