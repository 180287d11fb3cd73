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

#ifndef S2ST_ND_ATTENTION_H_
#define S2ST_ND_ATTENTION_H_

#include <string>
#include <vector>

#include "s2st/nd/ops.h"
#include "s2st/nd/parameters.h"

namespace s2st::nd {

// Projections of one multi-head attention block. The key projection has no
// bias: a key bias only shifts every score of a row by the same amount, so
// it would never receive a gradient.
struct AttentionParams {
  Tensor wq, bq;  // (q_dim, model_dim), (model_dim)
  Tensor wk;      // (kv_dim, model_dim)
  Tensor wv, bv;  // (kv_dim, model_dim), (model_dim)
  Tensor wo, bo;  // (model_dim, q_dim), (q_dim)
  int64_t n_heads = 1;

  int64_t model_dim() const { return wq.dim(1); }
};

AttentionParams CreateAttentionParams(ParameterSet& params, const std::string& prefix,
                                      int64_t q_dim, int64_t kv_dim, int64_t model_dim,
                                      int64_t n_heads, Rng& rng);

// Scaled dot-product attention per head with scale 1/sqrt(d_head); heads
// are concatenated and projected back to q_dim. q: (T_q, q_dim), k and v:
// (T_k, kv_dim), mask: (T_q, T_k) or broadcast row. When head_weights is
// given it receives each head's (T_q, T_k) attention matrix.
Tensor MultiHeadAttention(const Tensor& q, const Tensor& k, const Tensor& v,
                          const AttentionParams& p, const AttentionMask& mask,
                          std::vector<Tensor>* head_weights = nullptr);

// (length, dim) table: entry (pos, 2i) = sin(pos / 10000^(2i/dim)),
// (pos, 2i+1) = cos(same angle).
Tensor SinusoidalPositions(int64_t length, int64_t dim);

}  // namespace s2st::nd

#endif  // S2ST_ND_ATTENTION_H_
