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

#include "s2st/nd/gradient_suite.h"

#include <cmath>
#include <functional>

#include "s2st/nd/attention.h"
#include "s2st/nd/gradcheck.h"
#include "s2st/nd/ops.h"

namespace s2st::nd {

namespace {

// Values in [-1, -0.1] U [0.1, 1] keep kinked ops away from their kinks.
Tensor RandomLeaf(Shape shape, Rng& rng, bool away_from_zero = false) {
  std::vector<double> data(NumElements(shape));
  for (double& v : data) {
    v = rng.Uniform(-1.0, 1.0);
    if (away_from_zero) v = (v < 0 ? -0.1 : 0.1) + 0.9 * v;
  }
  return Tensor::FromData(std::move(shape), std::move(data), /*requires_grad=*/true);
}

Tensor Projector(const Shape& shape, Rng& rng) {
  std::vector<double> data(NumElements(shape));
  for (double& v : data) v = rng.Uniform(-1.0, 1.0);
  return Tensor::FromData(shape, std::move(data));
}

}  // namespace

std::vector<GradientCase> RunPrimitiveGradientSuite(uint64_t seed, double eps) {
  Rng rng(seed);
  std::vector<GradientCase> cases;
  auto run = [&](const std::string& name, std::vector<Tensor> params,
                 const std::function<Tensor()>& op) {
    const Tensor probe = op();
    const Tensor r = Projector(probe.shape(), rng);
    const auto f = [&] { return Sum(Mul(op(), r)); };
    const FiniteDiffReport rep = FiniteDiffCheckReport(f, params, eps);
    cases.push_back({name, rep.max_relative_error, rep.entries_checked});
  };

  {
    Tensor a = RandomLeaf({3, 4}, rng), b = RandomLeaf({4, 2}, rng);
    run("matmul", {a, b}, [=] { return MatMul(a, b); });
  }
  {
    Tensor a = RandomLeaf({3, 4}, rng), b = RandomLeaf({3, 4}, rng), c = RandomLeaf({4}, rng);
    run("add", {a, b}, [=] { return Add(a, b); });
    run("add_row_broadcast", {a, c}, [=] { return Add(a, c); });
    run("sub", {a, b}, [=] { return Sub(a, b); });
    run("mul", {a, b}, [=] { return Mul(a, b); });
    run("mul_row_broadcast", {a, c}, [=] { return Mul(a, c); });
    run("scale", {a}, [=] { return Scale(a, -1.7); });
    run("tanh", {a}, [=] { return Tanh(a); });
    run("sigmoid", {a}, [=] { return Sigmoid(a); });
    run("softplus", {a}, [=] { return Softplus(Scale(a, 3.0)); });
    run("softmax", {a}, [=] { return Softmax(Scale(a, 2.0)); });
    run("log_softmax", {a}, [=] { return LogSoftmax(Scale(a, 2.0)); });
    run("mean", {a}, [=] { return Mean(a); });
    run("sum", {a}, [=] { return Sum(a); });
    run("reshape", {a}, [=] { return Reshape(a, {2, 6}); });
    run("transpose", {a}, [=] { return Transpose(a); });
    run("slice", {a}, [=] { return Slice(a, 1, 1, 3); });
    run("concat", {a, b}, [=] {
      const Tensor parts[] = {a, b};
      return Concat(parts, 0);
    });
  }
  {
    Tensor a = RandomLeaf({3, 4}, rng, /*away_from_zero=*/true);
    run("relu", {a}, [=] { return Relu(a); });
    run("abs", {a}, [=] { return Abs(a); });
  }
  {
    Tensor a = RandomLeaf({3, 4}, rng);
    AttentionMask mask = AttentionMask::Causal(4);
    mask.rows = 3;
    mask.allowed.resize(12);
    run("softmax_masked", {a}, [=] { return Softmax(Scale(a, 2.0), &mask); });
  }
  {
    Tensor x = RandomLeaf({4, 5}, rng), g = RandomLeaf({5}, rng), b = RandomLeaf({5}, rng);
    run("layer_norm", {x, g, b}, [=] { return LayerNorm(x, g, b); });
  }
  {
    Tensor x = RandomLeaf({3, 5}, rng);
    run("dropout", {x}, [=] {
      Rng local(7);
      return Dropout(x, 0.3, &local, true);
    });
  }
  {
    Tensor table = RandomLeaf({5, 3}, rng);
    run("embedding_lookup", {table}, [=] {
      const int64_t ids[] = {4, 0, 4, 2};
      return EmbeddingLookup(table, ids);
    });
  }
  {
    Tensor x = RandomLeaf({2, 5, 6}, rng), w = RandomLeaf({3, 2, 3, 3}, rng),
           b = RandomLeaf({3}, rng);
    run("conv2d_same_stride2", {x, w, b},
        [=] { return Conv2d(x, w, b, {2, 2, Padding::kSame}); });
    run("conv2d_valid", {x, w, b}, [=] { return Conv2d(x, w, b, {1, 1, Padding::kValid}); });
    run("permute3d", {x}, [=] {
      const int64_t perm[] = {1, 0, 2};
      return Permute(x, perm);
    });
  }
  {
    Tensor q = RandomLeaf({3, 4}, rng), kv = RandomLeaf({5, 6}, rng);
    ParameterSet ps;
    Rng init(seed + 1);
    AttentionParams p = CreateAttentionParams(ps, "att", 4, 6, 4, 2, init);
    for (Tensor b : {p.bq, p.bv, p.bo}) {
      for (double& v : b.mutable_leaf_data()) v = init.Uniform(-0.5, 0.5);
    }
    std::vector<Tensor> params = {q, kv};
    for (const Tensor& t : ps.Trainable()) params.push_back(t);
    const AttentionMask mask = AttentionMask::All(3, 5);
    run("multi_head_attention", params, [=] { return MultiHeadAttention(q, kv, kv, p, mask); });
  }
  return cases;
}

}  // namespace s2st::nd
