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

#include "s2st/nd/attention.h"

#include <cmath>

#include "s2st/common/error.h"

namespace s2st::nd {

AttentionParams CreateAttentionParams(ParameterSet& params, const std::string& prefix,
                                      int64_t q_dim, int64_t kv_dim, int64_t model_dim,
                                      int64_t n_heads, Rng& rng) {
  if (n_heads < 1 || model_dim % n_heads != 0) {
    throw ShapeError("attention: model dim " + std::to_string(model_dim) +
                     " not divisible by " + std::to_string(n_heads) + " heads");
  }
  AttentionParams p;
  p.n_heads = n_heads;
  p.wq = params.Create(prefix + ".wq", {q_dim, model_dim}, Init::kXavierUniform, rng);
  p.bq = params.Create(prefix + ".bq", {model_dim}, Init::kZeros, rng);
  p.wk = params.Create(prefix + ".wk", {kv_dim, model_dim}, Init::kXavierUniform, rng);
  p.wv = params.Create(prefix + ".wv", {kv_dim, model_dim}, Init::kXavierUniform, rng);
  p.bv = params.Create(prefix + ".bv", {model_dim}, Init::kZeros, rng);
  p.wo = params.Create(prefix + ".wo", {model_dim, q_dim}, Init::kXavierUniform, rng);
  p.bo = params.Create(prefix + ".bo", {q_dim}, Init::kZeros, rng);
  return p;
}

Tensor MultiHeadAttention(const Tensor& q, const Tensor& k, const Tensor& v,
                          const AttentionParams& p, const AttentionMask& mask,
                          std::vector<Tensor>* head_weights) {
  const int64_t d = p.model_dim();
  if (p.n_heads < 1 || d % p.n_heads != 0) {
    throw ShapeError("attention: model dim " + std::to_string(d) + " not divisible by " +
                     std::to_string(p.n_heads) + " heads");
  }
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2 || k.dim(0) != v.dim(0)) {
    throw ShapeError("attention: q " + ShapeToString(q.shape()) + ", k " +
                     ShapeToString(k.shape()) + ", v " + ShapeToString(v.shape()));
  }
  const int64_t tq = q.dim(0), tk = k.dim(0);
  if (mask.cols != tk || (mask.rows != tq && mask.rows != 1)) {
    throw ShapeError("attention: mask (" + std::to_string(mask.rows) + ", " +
                     std::to_string(mask.cols) + ") for T_q=" + std::to_string(tq) +
                     ", T_k=" + std::to_string(tk));
  }
  const int64_t dh = d / p.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Tensor qp = Add(MatMul(q, p.wq), p.bq);
  const Tensor kp = MatMul(k, p.wk);
  const Tensor vp = Add(MatMul(v, p.wv), p.bv);
  std::vector<Tensor> heads;
  heads.reserve(p.n_heads);
  if (head_weights) head_weights->clear();
  for (int64_t h = 0; h < p.n_heads; ++h) {
    const Tensor qh = p.n_heads == 1 ? qp : Slice(qp, 1, h * dh, (h + 1) * dh);
    const Tensor kh = p.n_heads == 1 ? kp : Slice(kp, 1, h * dh, (h + 1) * dh);
    const Tensor vh = p.n_heads == 1 ? vp : Slice(vp, 1, h * dh, (h + 1) * dh);
    const Tensor scores = Scale(MatMul(qh, Transpose(kh)), scale);
    const Tensor weights = Softmax(scores, &mask);
    if (head_weights) head_weights->push_back(weights);
    heads.push_back(MatMul(weights, vh));
  }
  const Tensor merged = p.n_heads == 1 ? heads[0] : Concat(heads, 1);
  return Add(MatMul(merged, p.wo), p.bo);
}

Tensor SinusoidalPositions(int64_t length, int64_t dim) {
  if (dim % 2 != 0) throw ContractError("positional encoding dim must be even, got " +
                                        std::to_string(dim));
  if (length < 0) throw ContractError("negative positional length");
  std::vector<double> table(length * dim);
  for (int64_t pos = 0; pos < length; ++pos) {
    for (int64_t i = 0; i < dim / 2; ++i) {
      const double angle =
          static_cast<double>(pos) / std::pow(10000.0, 2.0 * i / static_cast<double>(dim));
      table[pos * dim + 2 * i] = std::sin(angle);
      table[pos * dim + 2 * i + 1] = std::cos(angle);
    }
  }
  return Tensor::FromData({length, dim}, std::move(table));
}

}  // namespace s2st::nd
