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

#ifndef S2ST_ND_AUTOGRAD_H_
#define S2ST_ND_AUTOGRAD_H_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "s2st/nd/tensor.h"

namespace s2st::nd {

// Gradients of leaf tensors keyed by leaf id. A missing entry means the
// gradient is zero.
class GradientMap {
 public:
  bool contains(uint64_t id) const { return grads_.count(id) != 0; }
  bool contains(const Tensor& leaf) const { return contains(leaf.id()); }
  // Gradient for the leaf, zeros of the leaf's shape when absent.
  std::vector<double> Get(const Tensor& leaf) const;
  const std::vector<double>* Find(uint64_t id) const;
  size_t size() const { return grads_.size(); }

  void Accumulate(uint64_t id, const std::vector<double>& grad);
  // Adds every entry of other, scaled.
  void AddScaled(const GradientMap& other, double scale = 1.0);
  void Set(uint64_t id, std::vector<double> grad) { grads_[id] = std::move(grad); }

  const std::unordered_map<uint64_t, std::vector<double>>& entries() const { return grads_; }

 private:
  std::unordered_map<uint64_t, std::vector<double>> grads_;
};

// Reverse-mode pass from a scalar loss. Each reachable node is visited once
// in reverse topological order; gradients from multiple paths are summed.
GradientMap Backward(const Tensor& loss);

}  // namespace s2st::nd

#endif  // S2ST_ND_AUTOGRAD_H_
