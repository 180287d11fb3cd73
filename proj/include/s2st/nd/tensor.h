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

#ifndef S2ST_ND_TENSOR_H_
#define S2ST_ND_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace s2st::nd {

using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

enum class OpKind {
  kLeaf,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kRelu,
  kTanh,
  kSigmoid,
  kAbs,
  kSoftplus,
  kSoftmax,
  kLogSoftmax,
  kLayerNorm,
  kDropout,
  kEmbeddingLookup,
  kConv2d,
  kReshape,
  kConcat,
  kSlice,
  kTranspose,
  kMean,
  kSum,
};

std::string_view OpName(OpKind kind);

// Storage precision for trainable state. Arithmetic always runs in double;
// in kFloat32 mode parameters and optimizer moments are rounded to the
// nearest float after every update so that they serialize losslessly to the
// 32-bit checkpoint payload.
enum class Precision { kFloat32, kFloat64 };

// Receives the upstream gradient of a node and accumulates into the
// gradient buffers of its inputs. A null buffer means that input does not
// require a gradient.
using BackwardFn = std::function<void(const std::vector<double>& grad_out,
                                      std::span<std::vector<double>* const> input_grads)>;

struct Node {
  uint64_t id = 0;
  OpKind kind = OpKind::kLeaf;
  Shape shape;
  std::vector<double> value;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;
};

// Handle to an immutable value in the differentiation graph. Copies share
// the underlying node. Only leaf tensors may be mutated, and only between
// graph constructions (parameter updates, finite-difference probes).
class Tensor {
 public:
  Tensor() = default;

  static Tensor FromData(Shape shape, std::vector<double> data,
                         bool requires_grad = false);
  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, double value);
  static Tensor Scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t rank() const { return static_cast<int64_t>(node_->shape.size()); }
  int64_t dim(int64_t axis) const;
  int64_t numel() const { return static_cast<int64_t>(node_->value.size()); }
  std::span<const double> data() const { return node_->value; }
  const std::vector<double>& values() const { return node_->value; }
  double item() const;
  double at(int64_t flat_index) const { return node_->value[flat_index]; }
  bool requires_grad() const { return node_->requires_grad; }
  uint64_t id() const { return node_->id; }
  OpKind kind() const { return node_->kind; }
  bool is_leaf() const { return node_->kind == OpKind::kLeaf; }

  // Mutable storage of a leaf; throws ContractError on non-leaf tensors.
  std::span<double> mutable_leaf_data();

  const std::shared_ptr<Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<Node> node_;
};

uint64_t NextNodeId();

// Graph recording is enabled by default; a NoGradGuard disables it on the
// current thread for its lifetime (inference, decoding).
bool GradModeEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Creates the result node of an operation. The node records its inputs and
// backward function only if grad mode is on and some input requires grad.
// Throws NumericError if any output value is not finite.
Tensor MakeResult(OpKind kind, Shape shape, std::vector<double> value,
                  std::vector<Tensor> inputs, BackwardFn backward);

}  // namespace s2st::nd

#endif  // S2ST_ND_TENSOR_H_
