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

#include "s2st/common/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "s2st/common/error.h"

namespace s2st {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

void ByteWriter::PutU32(uint32_t v) {
  buffer_.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

void ByteWriter::PutU64(uint64_t v) {
  buffer_.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

void ByteWriter::PutF32(float v) {
  buffer_.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

void ByteWriter::PutF64(double v) {
  buffer_.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

void ByteWriter::PutBytes(std::string_view bytes) { buffer_.append(bytes); }

void ByteWriter::PutString(std::string_view s) {
  PutU32(static_cast<uint32_t>(s.size()));
  PutBytes(s);
}

void ByteReader::Need(size_t n) const {
  if (bytes_.size() - pos_ < n) {
    std::ostringstream msg;
    msg << context_ << ": truncated at byte " << pos_ << " (need " << n
        << " more, have " << bytes_.size() - pos_ << ")";
    throw IntegrityError(msg.str());
  }
}

uint32_t ByteReader::GetU32() {
  Need(4);
  uint32_t v;
  std::memcpy(&v, bytes_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

uint64_t ByteReader::GetU64() {
  Need(8);
  uint64_t v;
  std::memcpy(&v, bytes_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

float ByteReader::GetF32() {
  Need(4);
  float v;
  std::memcpy(&v, bytes_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

double ByteReader::GetF64() {
  Need(8);
  double v;
  std::memcpy(&v, bytes_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

std::string_view ByteReader::GetBytes(size_t n) {
  Need(n);
  std::string_view out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::GetString() {
  const uint32_t n = GetU32();
  return std::string(GetBytes(n));
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

uint64_t Fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace s2st
