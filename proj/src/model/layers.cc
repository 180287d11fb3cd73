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

#include "s2st/model/layers.h"

#include "s2st/common/error.h"

namespace s2st::model {

using nd::AttentionMask;
using nd::Init;
using nd::Tensor;

Tensor ApplyDropout(const Tensor& x, double p, RunContext& ctx) {
  if (!ctx.training || p <= 0.0) return x;
  if (ctx.rng == nullptr) throw ContractError("dropout in training mode needs an rng");
  return nd::Dropout(x, p, ctx.rng, true);
}

Linear Linear::Create(nd::ParameterSet& ps, const std::string& name, int64_t in, int64_t out,
                      Rng& rng, bool bias) {
  Linear l;
  l.w = ps.Create(name + ".w", {in, out}, Init::kXavierUniform, rng);
  if (bias) l.b = ps.Create(name + ".b", {out}, Init::kZeros, rng);
  return l;
}

Tensor Linear::operator()(const Tensor& x) const {
  Tensor y = nd::MatMul(x, w);
  return b.defined() ? nd::Add(y, b) : y;
}

LayerNormParams LayerNormParams::Create(nd::ParameterSet& ps, const std::string& name,
                                        int64_t dim, Rng& rng) {
  return {ps.Create(name + ".gain", {dim}, Init::kOnes, rng),
          ps.Create(name + ".bias", {dim}, Init::kZeros, rng)};
}

Tensor LayerNormParams::operator()(const Tensor& x) const { return nd::LayerNorm(x, gain, bias); }

FeedForward FeedForward::Create(nd::ParameterSet& ps, const std::string& name, int64_t dim,
                                int64_t hidden, Rng& rng) {
  return {Linear::Create(ps, name + ".in", dim, hidden, rng),
          Linear::Create(ps, name + ".out", hidden, dim, rng)};
}

Tensor FeedForward::operator()(const Tensor& x, RunContext& ctx) const {
  return out(ApplyDropout(nd::Relu(in(x)), ctx.dropout, ctx));
}

EncoderLayer EncoderLayer::Create(nd::ParameterSet& ps, const std::string& name, int64_t dim,
                                  int64_t heads, int64_t ffn_dim, Rng& rng) {
  EncoderLayer l;
  l.ln_attn = LayerNormParams::Create(ps, name + ".ln_attn", dim, rng);
  l.attn = nd::CreateAttentionParams(ps, name + ".attn", dim, dim, dim, heads, rng);
  l.ln_ffn = LayerNormParams::Create(ps, name + ".ln_ffn", dim, rng);
  l.ffn = FeedForward::Create(ps, name + ".ffn", dim, ffn_dim, rng);
  return l;
}

Tensor EncoderLayer::operator()(const Tensor& x, const AttentionMask& mask,
                                RunContext& ctx) const {
  const Tensor h = ln_attn(x);
  Tensor y = nd::Add(x, ApplyDropout(nd::MultiHeadAttention(h, h, h, attn, mask), ctx.dropout, ctx));
  return nd::Add(y, ApplyDropout(ffn(ln_ffn(y), ctx), ctx.dropout, ctx));
}

DecoderLayer DecoderLayer::Create(nd::ParameterSet& ps, const std::string& name, int64_t dim,
                                  int64_t memory_dim, int64_t heads, int64_t ffn_dim, Rng& rng) {
  DecoderLayer l;
  l.ln_self = LayerNormParams::Create(ps, name + ".ln_self", dim, rng);
  l.self_attn = nd::CreateAttentionParams(ps, name + ".self_attn", dim, dim, dim, heads, rng);
  l.ln_cross = LayerNormParams::Create(ps, name + ".ln_cross", dim, rng);
  l.cross_attn =
      nd::CreateAttentionParams(ps, name + ".cross_attn", dim, memory_dim, dim, heads, rng);
  l.ln_ffn = LayerNormParams::Create(ps, name + ".ln_ffn", dim, rng);
  l.ffn = FeedForward::Create(ps, name + ".ffn", dim, ffn_dim, rng);
  return l;
}

Tensor DecoderLayer::operator()(const Tensor& x, const Tensor& memory, RunContext& ctx) const {
  const int64_t steps = x.dim(0);
  const AttentionMask causal = AttentionMask::Causal(steps);
  const AttentionMask open = AttentionMask::All(1, memory.dim(0));
  const Tensor h = ln_self(x);
  Tensor y = nd::Add(
      x, ApplyDropout(nd::MultiHeadAttention(h, h, h, self_attn, causal), ctx.dropout, ctx));
  const Tensor c = ln_cross(y);
  y = nd::Add(y, ApplyDropout(nd::MultiHeadAttention(c, memory, memory, cross_attn, open),
                              ctx.dropout, ctx));
  return nd::Add(y, ApplyDropout(ffn(ln_ffn(y), ctx), ctx.dropout, ctx));
}

}  // namespace s2st::model
