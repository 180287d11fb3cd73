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

#include "s2st/train/optimizer.h"

#include <cmath>

#include "s2st/common/error.h"

namespace s2st::train {

AdamOptimizer::AdamOptimizer(const nd::ParameterSet& params, AdamConfig config)
    : config_(config) {
  for (const auto& e : params.entries()) {
    names_.push_back(e.name);
    const size_t n = e.trainable ? static_cast<size_t>(e.tensor.numel()) : 0;
    m_.emplace_back(n, 0.0);
    v_.emplace_back(n, 0.0);
  }
}

AdamOptimizer::StepInfo AdamOptimizer::Step(
    nd::ParameterSet& params, const nd::GradientMap& grads, double lr, nd::Precision precision,
    const std::function<bool(const std::string&)>& trainable) {
  const auto& entries = params.entries();
  if (entries.size() != names_.size()) {
    throw ShapeError("adam: parameter set has " + std::to_string(entries.size()) +
                     " entries, optimizer " + std::to_string(names_.size()));
  }
  StepInfo info;
  double sq = 0.0;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name != names_[i]) {
      throw ShapeError("adam: entry " + std::to_string(i) + " is '" + entries[i].name +
                       "', expected '" + names_[i] + "'");
    }
    if (!entries[i].trainable) continue;
    if (trainable && !trainable(entries[i].name)) continue;
    const std::vector<double>* g = grads.Find(entries[i].tensor.id());
    if (g == nullptr) continue;
    if (g->size() != m_[i].size()) {
      throw ShapeError("adam: gradient of '" + entries[i].name + "' has " +
                       std::to_string(g->size()) + " values, parameter " +
                       std::to_string(m_[i].size()));
    }
    for (double x : *g) sq += x * x;
  }
  info.grad_norm = std::sqrt(sq);
  if (config_.clip_norm > 0 && info.grad_norm > config_.clip_norm) {
    info.clip_scale = config_.clip_norm / info.grad_norm;
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].trainable) continue;
    if (trainable && !trainable(entries[i].name)) continue;
    const std::vector<double>* g = grads.Find(entries[i].tensor.id());
    std::span<double> w = nd::Tensor(entries[i].tensor).mutable_leaf_data();
    std::vector<double>& m = m_[i];
    std::vector<double>& v = v_[i];
    for (size_t k = 0; k < m.size(); ++k) {
      const double gk = g ? (*g)[k] * info.clip_scale : 0.0;
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * gk;
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * gk * gk;
      const double update = lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + config_.eps);
      w[k] -= update;
      if (precision == nd::Precision::kFloat32) w[k] = nd::RoundToFloat(w[k]);
    }
  }
  return info;
}

void AdamOptimizer::SerializeTo(ByteWriter& out) const {
  out.PutU64(static_cast<uint64_t>(step_));
  out.PutU32(static_cast<uint32_t>(names_.size()));
  for (size_t i = 0; i < names_.size(); ++i) {
    out.PutString(names_[i]);
    out.PutU32(static_cast<uint32_t>(m_[i].size()));
    for (double x : m_[i]) out.PutF64(x);
    for (double x : v_[i]) out.PutF64(x);
  }
}

void AdamOptimizer::DeserializeFrom(ByteReader& in) {
  const int64_t step = static_cast<int64_t>(in.GetU64());
  const uint32_t count = in.GetU32();
  if (count != names_.size()) {
    throw IntegrityError("optimizer state has " + std::to_string(count) + " entries, expected " +
                         std::to_string(names_.size()));
  }
  std::vector<std::vector<double>> m(count), v(count);
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = in.GetString();
    if (name != names_[i]) {
      throw IntegrityError("optimizer state entry '" + name + "' where '" + names_[i] +
                           "' was expected");
    }
    const uint32_t n = in.GetU32();
    if (n != m_[i].size()) throw IntegrityError("optimizer state size mismatch for " + name);
    m[i].resize(n);
    v[i].resize(n);
    for (double& x : m[i]) x = in.GetF64();
    for (double& x : v[i]) x = in.GetF64();
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace s2st::train
