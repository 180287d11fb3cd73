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

#ifndef S2ST_COMMON_BINARY_IO_H_
#define S2ST_COMMON_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace s2st {

// Little-endian byte writer backed by an in-memory buffer.
class ByteWriter {
 public:
  void PutU32(uint32_t v);
  void PutU64(uint64_t v);
  void PutI32(int32_t v) { PutU32(static_cast<uint32_t>(v)); }
  void PutF32(float v);
  void PutF64(double v);
  void PutBytes(std::string_view bytes);
  void PutString(std::string_view s);  // u32 length + bytes

  const std::string& bytes() const { return buffer_; }
  std::string Release() { return std::move(buffer_); }

 private:
  std::string buffer_;
};

// Bounds-checked little-endian reader. Running past the end raises
// IntegrityError so that truncated files are reported, not misread.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes, std::string context = "buffer")
      : bytes_(bytes), context_(std::move(context)) {}

  uint32_t GetU32();
  uint64_t GetU64();
  int32_t GetI32() { return static_cast<int32_t>(GetU32()); }
  float GetF32();
  double GetF64();
  std::string_view GetBytes(size_t n);
  std::string GetString();

  size_t remaining() const { return bytes_.size() - pos_; }
  size_t position() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n) const;

  std::string_view bytes_;
  size_t pos_ = 0;
  std::string context_;
};

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

// 64-bit FNV-1a, used for config fingerprints.
uint64_t Fnv1a64(std::string_view data);

}  // namespace s2st

#endif  // S2ST_COMMON_BINARY_IO_H_
