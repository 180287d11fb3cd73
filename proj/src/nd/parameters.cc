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

#include "s2st/nd/parameters.h"

#include <cmath>

#include "s2st/common/error.h"

namespace s2st::nd {

namespace {

constexpr std::string_view kParamMagic = "S2STPARM";
constexpr uint32_t kParamVersion = 1;

std::pair<double, double> Fans(const Shape& shape) {
  if (shape.size() == 1) return {static_cast<double>(shape[0]), static_cast<double>(shape[0])};
  if (shape.size() == 2) return {static_cast<double>(shape[0]), static_cast<double>(shape[1])};
  double receptive = 1.0;
  for (size_t i = 2; i < shape.size(); ++i) receptive *= static_cast<double>(shape[i]);
  return {shape[1] * receptive, shape[0] * receptive};
}

}  // namespace

Tensor ParameterSet::Create(const std::string& name, Shape shape, Init init, Rng& rng,
                            double stddev) {
  if (Has(name)) throw ContractError("duplicate parameter name " + name);
  const int64_t n = NumElements(shape);
  std::vector<double> data(n, 0.0);
  switch (init) {
    case Init::kZeros: break;
    case Init::kOnes: std::fill(data.begin(), data.end(), 1.0); break;
    case Init::kXavierUniform: {
      const auto [fan_in, fan_out] = Fans(shape);
      const double a = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& v : data) v = rng.Uniform(-a, a);
      break;
    }
    case Init::kNormal:
      for (double& v : data) v = rng.Normal(0.0, stddev);
      break;
  }
  Tensor t = Tensor::FromData(std::move(shape), std::move(data), /*requires_grad=*/true);
  index_[name] = entries_.size();
  entries_.push_back({name, t, true});
  return t;
}

Tensor ParameterSet::CreateBuffer(const std::string& name, Shape shape, double fill) {
  if (Has(name)) throw ContractError("duplicate parameter name " + name);
  Tensor t = Tensor::Full(std::move(shape), fill);
  index_[name] = entries_.size();
  entries_.push_back({name, t, false});
  return t;
}

bool ParameterSet::Has(std::string_view name) const { return index_.find(name) != index_.end(); }

Tensor ParameterSet::Get(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("no parameter named " + std::string(name));
  return entries_[it->second].tensor;
}

int64_t ParameterSet::TrainableElements() const {
  int64_t n = 0;
  for (const auto& e : entries_) {
    if (e.trainable) n += e.tensor.numel();
  }
  return n;
}

std::vector<Tensor> ParameterSet::Trainable() const {
  std::vector<Tensor> out;
  for (const auto& e : entries_) {
    if (e.trainable) out.push_back(e.tensor);
  }
  return out;
}

size_t ParameterSet::CopyValuesFrom(const ParameterSet& other) {
  size_t copied = 0;
  for (auto& e : entries_) {
    auto it = other.index_.find(e.name);
    if (it == other.index_.end()) continue;
    const Tensor& src = other.entries_[it->second].tensor;
    if (src.shape() != e.tensor.shape()) {
      throw ShapeError("parameter " + e.name + " has shape " + ShapeToString(src.shape()) +
                       " in source, " + ShapeToString(e.tensor.shape()) + " here");
    }
    auto dst = e.tensor.mutable_leaf_data();
    std::copy(src.data().begin(), src.data().end(), dst.begin());
    ++copied;
  }
  return copied;
}

void ParameterSet::RoundTo(Precision precision) {
  if (precision != Precision::kFloat32) return;
  for (auto& e : entries_) {
    for (double& v : e.tensor.mutable_leaf_data()) v = RoundToFloat(v);
  }
}

void ParameterSet::SerializeTo(ByteWriter& out) const {
  out.PutU32(static_cast<uint32_t>(entries_.size()));
  for (const auto& e : entries_) {
    out.PutString(e.name);
    out.PutU32(e.trainable ? 1 : 0);
    out.PutU32(static_cast<uint32_t>(e.tensor.rank()));
    for (int64_t d : e.tensor.shape()) out.PutU32(static_cast<uint32_t>(d));
    for (double v : e.tensor.data()) out.PutF32(static_cast<float>(v));
  }
}

void ParameterSet::DeserializeFrom(ByteReader& in) {
  const uint32_t count = in.GetU32();
  if (count != entries_.size()) {
    throw IntegrityError("parameter block holds " + std::to_string(count) +
                         " entries, model expects " + std::to_string(entries_.size()));
  }
  for (uint32_t k = 0; k < count; ++k) {
    const std::string name = in.GetString();
    const bool trainable = in.GetU32() != 0;
    const uint32_t rank = in.GetU32();
    Shape shape(rank);
    for (auto& d : shape) d = in.GetU32();
    auto it = index_.find(name);
    if (it == index_.end()) throw IntegrityError("unknown parameter " + name);
    Entry& e = entries_[it->second];
    if (e.tensor.shape() != shape || e.trainable != trainable) {
      throw IntegrityError("parameter " + name + " stored as " + ShapeToString(shape) +
                           ", model has " + ShapeToString(e.tensor.shape()));
    }
    auto dst = e.tensor.mutable_leaf_data();
    for (double& v : dst) v = static_cast<double>(in.GetF32());
  }
}

void SaveParameters(const ParameterSet& params, const std::filesystem::path& path) {
  ByteWriter out;
  out.PutBytes(kParamMagic);
  out.PutU32(kParamVersion);
  params.SerializeTo(out);
  WriteFileBytes(path, out.bytes());
}

void LoadParameters(ParameterSet& params, const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  ByteReader in(bytes, path.string());
  if (in.GetBytes(kParamMagic.size()) != kParamMagic) {
    throw IntegrityError(path.string() + " is not a parameter file");
  }
  if (in.GetU32() != kParamVersion) throw IntegrityError("unsupported parameter file version");
  params.DeserializeFrom(in);
  if (!in.done()) throw IntegrityError(path.string() + " has trailing bytes");
}

}  // namespace s2st::nd
