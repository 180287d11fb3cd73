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

#ifndef S2ST_DATA_PHONEMIZE_H_
#define S2ST_DATA_PHONEMIZE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace s2st::data {

// Phone symbol table. Ids 0..2 are <pad>, <bos>, <eos>; phones follow in
// the given order.
class PhoneInventory {
 public:
  PhoneInventory() = default;
  explicit PhoneInventory(std::vector<std::string> phones);

  int64_t size() const { return static_cast<int64_t>(symbols_.size()); }
  // Throws VocabError for unknown symbols or ids.
  int64_t Id(const std::string& symbol) const;
  const std::string& Symbol(int64_t id) const;
  bool Contains(const std::string& symbol) const { return ids_.count(symbol) != 0; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  // Space-joined symbols, skipping the specials.
  std::string ToText(std::span<const int64_t> ids) const;

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int64_t> ids_;
};

using Lexicon = std::map<std::string, std::vector<std::string>>;

enum class OovPolicy { kSkip, kError };

struct PhonemizeOptions {
  OovPolicy oov = OovPolicy::kError;
  // Inserted between consecutive words when set.
  std::optional<std::string> word_boundary;
};

// Whitespace-split, lowercase-insensitive lookup of each word. OOV words
// either vanish or raise OovError listing all of them.
std::vector<std::string> PhonemizeSymbols(const std::string& text, const Lexicon& lexicon,
                                          const PhonemizeOptions& options);
std::vector<int64_t> Phonemize(const std::string& text, const Lexicon& lexicon,
                               const PhonemizeOptions& options, const PhoneInventory& inventory);

// JSON object {"word": ["PH", ...], ...}.
Lexicon ReadLexicon(const std::filesystem::path& path);
void WriteLexicon(const Lexicon& lexicon, const std::filesystem::path& path);
// JSON array of phone symbols.
PhoneInventory ReadInventory(const std::filesystem::path& path);
void WriteInventory(const PhoneInventory& inventory, const std::filesystem::path& path);

}  // namespace s2st::data

#endif  // S2ST_DATA_PHONEMIZE_H_
