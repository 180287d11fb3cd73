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

#ifndef S2ST_ND_PARAMETERS_H_
#define S2ST_ND_PARAMETERS_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "s2st/common/binary_io.h"
#include "s2st/common/random.h"
#include "s2st/nd/tensor.h"

namespace s2st::nd {

enum class Init {
  kZeros,
  kOnes,
  kXavierUniform,  // U(-a, a), a = sqrt(6 / (fan_in + fan_out))
  kNormal,         // N(0, stddev)
};

// Named, ordered collection of leaf tensors. Trainable entries require
// grad; buffers (e.g. feature statistics) are stored and serialized but
// never differentiated.
class ParameterSet {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
    bool trainable = true;
  };

  Tensor Create(const std::string& name, Shape shape, Init init, Rng& rng,
                double stddev = 0.0);
  Tensor CreateBuffer(const std::string& name, Shape shape, double fill = 0.0);

  bool Has(std::string_view name) const;
  Tensor Get(std::string_view name) const;
  const std::vector<Entry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  // Number of trainable scalars.
  int64_t TrainableElements() const;
  std::vector<Tensor> Trainable() const;

  // Overwrites values of same-named entries in this set. Shapes must agree.
  // Returns the number of entries copied.
  size_t CopyValuesFrom(const ParameterSet& other);

  // Rounds every value to float when precision is kFloat32.
  void RoundTo(Precision precision);

  // Binary block: u32 count, then per entry {u32 name length, name bytes,
  // u32 trainable flag, u32 rank, u32 extents..., f32 payload}.
  void SerializeTo(ByteWriter& out) const;
  // Reads a block written by SerializeTo into this set. Every stored name
  // must exist here with an identical shape and vice versa.
  void DeserializeFrom(ByteReader& in);

 private:
  std::vector<Entry> entries_;
  std::map<std::string, size_t, std::less<>> index_;
};

// Standalone parameter file: magic "S2STPARM", u32 version, block.
void SaveParameters(const ParameterSet& params, const std::filesystem::path& path);
void LoadParameters(ParameterSet& params, const std::filesystem::path& path);

inline double RoundToFloat(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace s2st::nd

#endif  // S2ST_ND_PARAMETERS_H_
