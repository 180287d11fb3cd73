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

#include "s2st/nd/autograd.h"

#include <unordered_map>

#include "s2st/common/error.h"

namespace s2st::nd {

std::vector<double> GradientMap::Get(const Tensor& leaf) const {
  auto it = grads_.find(leaf.id());
  if (it == grads_.end()) return std::vector<double>(leaf.numel(), 0.0);
  return it->second;
}

const std::vector<double>* GradientMap::Find(uint64_t id) const {
  auto it = grads_.find(id);
  return it == grads_.end() ? nullptr : &it->second;
}

void GradientMap::Accumulate(uint64_t id, const std::vector<double>& grad) {
  auto [it, inserted] = grads_.try_emplace(id, grad);
  if (!inserted) {
    if (it->second.size() != grad.size()) throw ShapeError("gradient size mismatch");
    for (size_t i = 0; i < grad.size(); ++i) it->second[i] += grad[i];
  }
}

void GradientMap::AddScaled(const GradientMap& other, double scale) {
  for (const auto& [id, g] : other.grads_) {
    auto [it, inserted] = grads_.try_emplace(id, g.size(), 0.0);
    for (size_t i = 0; i < g.size(); ++i) it->second[i] += scale * g[i];
  }
}

GradientMap Backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " +
                        (loss.defined() ? ShapeToString(loss.shape()) : std::string("<undefined>")));
  }
  GradientMap result;
  if (!loss.requires_grad()) {
    throw ContractError("loss does not depend on any tensor that requires grad");
  }

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<Node*> order;
  std::unordered_map<Node*, size_t> index;
  {
    std::vector<std::pair<Node*, size_t>> stack;
    std::unordered_map<Node*, bool> visited;
    stack.emplace_back(loss.node().get(), 0);
    visited[loss.node().get()] = true;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->inputs.size()) {
        Node* child = node->inputs[next++].get();
        if (child->requires_grad && !visited[child]) {
          visited[child] = true;
          stack.emplace_back(child, 0);
        }
      } else {
        index[node] = order.size();
        order.push_back(node);
        stack.pop_back();
      }
    }
  }

  std::vector<std::vector<double>> grads(order.size());
  grads.back().assign(1, 1.0);
  std::vector<std::vector<double>*> input_grads;
  for (size_t k = order.size(); k-- > 0;) {
    Node* node = order[k];
    std::vector<double>& g = grads[k];
    if (node->kind == OpKind::kLeaf) {
      if (!g.empty()) result.Accumulate(node->id, g);
      continue;
    }
    if (g.empty() || !node->backward) continue;
    input_grads.assign(node->inputs.size(), nullptr);
    for (size_t i = 0; i < node->inputs.size(); ++i) {
      Node* in = node->inputs[i].get();
      if (!in->requires_grad) continue;
      auto& buf = grads[index.at(in)];
      if (buf.empty()) buf.assign(in->value.size(), 0.0);
      input_grads[i] = &buf;
    }
    node->backward(g, input_grads);
    std::vector<double>().swap(g);
  }
  return result;
}

}  // namespace s2st::nd
