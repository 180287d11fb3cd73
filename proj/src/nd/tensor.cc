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

#include "s2st/nd/tensor.h"

#include <atomic>
#include <cmath>
#include <sstream>

#include "s2st/common/error.h"

namespace s2st::nd {

namespace {

thread_local bool grad_mode_enabled = true;
std::atomic<uint64_t> next_node_id{1};

}  // namespace

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

std::string_view OpName(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kRelu: return "relu";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kAbs: return "abs";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLogSoftmax: return "log_softmax";
    case OpKind::kLayerNorm: return "layer_norm";
    case OpKind::kDropout: return "dropout";
    case OpKind::kEmbeddingLookup: return "embedding_lookup";
    case OpKind::kConv2d: return "conv2d";
    case OpKind::kReshape: return "reshape";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
  }
  return "unknown";
}

uint64_t NextNodeId() { return next_node_id.fetch_add(1, std::memory_order_relaxed); }

Tensor Tensor::FromData(Shape shape, std::vector<double> data, bool requires_grad) {
  for (int64_t d : shape) {
    if (d < 0) throw ShapeError("negative extent in " + ShapeToString(shape));
  }
  if (NumElements(shape) != static_cast<int64_t>(data.size())) {
    std::ostringstream msg;
    msg << "shape " << ShapeToString(shape) << " needs " << NumElements(shape)
        << " values, got " << data.size();
    throw ShapeError(msg.str());
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in tensor data");
  }
  auto node = std::make_shared<Node>();
  node->id = NextNodeId();
  node->shape = std::move(shape);
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  const int64_t n = NumElements(shape);
  return FromData(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::Full(Shape shape, double value) {
  const int64_t n = NumElements(shape);
  return FromData(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::Scalar(double value) { return FromData({}, {value}); }

int64_t Tensor::dim(int64_t axis) const {
  const int64_t r = rank();
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) {
    throw ShapeError("axis out of range for shape " + ShapeToString(shape()));
  }
  return node_->shape[axis];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw ContractError("item() on tensor of shape " + ShapeToString(shape()));
  }
  return node_->value[0];
}

std::span<double> Tensor::mutable_leaf_data() {
  if (!is_leaf()) throw ContractError("only leaf tensors may be mutated");
  return node_->value;
}

bool GradModeEnabled() { return grad_mode_enabled; }

NoGradGuard::NoGradGuard() : previous_(grad_mode_enabled) { grad_mode_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_mode_enabled = previous_; }

Tensor MakeResult(OpKind kind, Shape shape, std::vector<double> value,
                  std::vector<Tensor> inputs, BackwardFn backward) {
  for (double v : value) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite output of ") +
                         std::string(OpName(kind)) + " with shape " +
                         ShapeToString(shape));
    }
  }
  auto node = std::make_shared<Node>();
  node->id = NextNodeId();
  node->kind = kind;
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool any_grad = false;
  if (grad_mode_enabled) {
    for (const Tensor& t : inputs) any_grad = any_grad || t.requires_grad();
  }
  if (any_grad) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (Tensor& t : inputs) node->inputs.push_back(t.node());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

}  // namespace s2st::nd
