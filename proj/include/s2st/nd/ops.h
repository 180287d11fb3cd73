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

#ifndef S2ST_ND_OPS_H_
#define S2ST_ND_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "s2st/common/random.h"
#include "s2st/nd/tensor.h"

namespace s2st::nd {

// Boolean (rows x cols) matrix of attendable positions for Softmax. A mask
// with rows == 1 broadcasts over every row of the input.
struct AttentionMask {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<uint8_t> allowed;

  static AttentionMask All(int64_t rows, int64_t cols);
  static AttentionMask Causal(int64_t n);
  bool at(int64_t r, int64_t c) const {
    return allowed[(rows == 1 ? 0 : r) * cols + c] != 0;
  }
};

enum class Padding { kSame, kValid };

struct Conv2dOptions {
  int64_t stride_h = 1;
  int64_t stride_w = 1;
  Padding padding = Padding::kSame;
};

// Output extent of one conv axis. kSame gives ceil(in / stride).
int64_t ConvOutputExtent(int64_t in, int64_t kernel, int64_t stride, Padding padding);

// (m x k) @ (k x n).
Tensor MatMul(const Tensor& a, const Tensor& b);
// Elementwise; b may also be a vector matching a's last dim (row broadcast).
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double factor);
Tensor Relu(const Tensor& x);
Tensor Tanh(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Abs(const Tensor& x);
Tensor Softplus(const Tensor& x);
// Along the last axis, max-subtracted. Masked positions get exactly zero
// weight; a row with no attendable position raises ContractError.
Tensor Softmax(const Tensor& x, const AttentionMask* mask = nullptr);
Tensor LogSoftmax(const Tensor& x);
// Normalizes over the last axis with population variance.
Tensor LayerNorm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                 double eps = 1e-5);
// Inverted dropout. Identity when !training or p == 0.
Tensor Dropout(const Tensor& x, double p, Rng* rng, bool training);
// Rows of table (V x d) selected by ids; out-of-range ids raise VocabError.
Tensor EmbeddingLookup(const Tensor& table, std::span<const int64_t> ids);
// x: (C_in, H, W); weight: (C_out, C_in, kh, kw); bias: (C_out) or undefined.
Tensor Conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              const Conv2dOptions& options);
Tensor Reshape(const Tensor& x, Shape shape);
Tensor Concat(std::span<const Tensor> parts, int64_t axis);
// Half-open range [start, end) along axis.
Tensor Slice(const Tensor& x, int64_t axis, int64_t start, int64_t end);
// Swaps the two axes of a matrix.
Tensor Transpose(const Tensor& x);
// General axis permutation; output axis i is input axis perm[i].
Tensor Permute(const Tensor& x, std::span<const int64_t> perm);
Tensor Sum(const Tensor& x);
Tensor Mean(const Tensor& x);

// Attribute bag for the generic dispatcher below.
struct PrimitiveAttrs {
  double factor = 1.0;          // scale
  double p = 0.0;               // dropout
  bool training = false;        // dropout
  Rng* rng = nullptr;           // dropout
  double eps = 1e-5;            // layer_norm
  const AttentionMask* mask = nullptr;  // softmax
  std::vector<int64_t> ids;     // embedding_lookup
  Conv2dOptions conv;           // conv2d
  Shape shape;                  // reshape
  std::vector<int64_t> perm;    // transpose (empty: 2-D swap)
  int64_t axis = 0;             // concat, slice
  int64_t start = 0, end = 0;   // slice
};

// Applies the primitive of the given kind. Input arity follows the named
// functions above (conv2d and layer_norm take three inputs).
Tensor ForwardPrimitive(OpKind kind, std::span<const Tensor> inputs,
                        const PrimitiveAttrs& attrs = {});

}  // namespace s2st::nd

#endif  // S2ST_ND_OPS_H_
