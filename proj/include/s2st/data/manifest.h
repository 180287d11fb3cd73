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

#ifndef S2ST_DATA_MANIFEST_H_
#define S2ST_DATA_MANIFEST_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2st/data/record.h"

namespace s2st::data {

struct CorpusManifest {
  Role role = Role::kPrimary;
  std::vector<UtteranceRecord> records;
  // Directory the manifest was read from; relative paths resolve against it.
  std::filesystem::path base_dir;

  // Throws ContractError if a record's category disagrees with the role or
  // an id repeats.
  void Validate() const;
  std::filesystem::path Resolve(const std::string& path) const;

  bool operator==(const CorpusManifest& o) const {
    return role == o.role && records == o.records;
  }
};

nlohmann::ordered_json RecordToJson(const UtteranceRecord& r);
UtteranceRecord RecordFromJson(const nlohmann::json& j);

// Line-delimited JSON: an optional header {"role": ...} followed by one
// record per line in a fixed field order. Empty files are empty manifests.
// Duplicate ids and malformed lines raise ParseError with the line number.
CorpusManifest ReadManifest(const std::filesystem::path& path);
void WriteManifest(const CorpusManifest& manifest, const std::filesystem::path& path);

// Path relative to base when `path` lies under it, else absolute.
std::string RelativeTo(const std::filesystem::path& path, const std::filesystem::path& base);

}  // namespace s2st::data

#endif  // S2ST_DATA_MANIFEST_H_
