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

#ifndef S2ST_DATA_RECORD_H_
#define S2ST_DATA_RECORD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace s2st::data {

enum class Category { kPrimary, kSecondary };
enum class Origin { kReal, kPseudo };
enum class Role { kPrimary, kSecondary, kMixed };

std::string_view CategoryName(Category c);
std::string_view OriginName(Origin o);
std::string_view RoleName(Role r);
Category ParseCategory(std::string_view s);
Origin ParseOrigin(std::string_view s);
Role ParseRole(std::string_view s);

// Record flags.
inline constexpr std::string_view kFlagSynthesisFailed = "synthesis_failed";
inline constexpr std::string_view kFlagTranslationFailed = "translation_failed";

// One utterance of dataset A or B. Paths are stored as written in the
// manifest (relative paths resolve against the manifest directory).
struct UtteranceRecord {
  std::string id;
  std::string src_audio;
  int src_sr = 0;
  std::string src_text;
  std::vector<int64_t> src_phones;
  std::string tgt_text;
  Origin tgt_text_origin = Origin::kReal;
  std::vector<int64_t> tgt_phones;
  std::string tgt_audio;
  Origin tgt_audio_origin = Origin::kPseudo;
  Category category = Category::kPrimary;

  // Filled by later stages.
  int64_t src_frames = 0;
  double src_duration = 0.0;
  int64_t tgt_frames = 0;
  std::string src_mel;
  std::string tgt_mel;
  std::vector<std::string> flags;
  std::string drop_reason;

  bool HasFlag(std::string_view flag) const;
  void AddFlag(std::string_view flag);

  bool operator==(const UtteranceRecord&) const = default;
};

}  // namespace s2st::data

#endif  // S2ST_DATA_RECORD_H_
