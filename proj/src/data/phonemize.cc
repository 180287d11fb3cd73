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

#include "s2st/data/phonemize.h"

#include <sstream>

#include "json.hpp"
#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/common/phones.h"

namespace s2st::data {

PhoneInventory::PhoneInventory(std::vector<std::string> phones) {
  symbols_ = {"<pad>", "<bos>", "<eos>"};
  for (std::string& p : phones) {
    if (ids_.count(p) || p == "<pad>" || p == "<bos>" || p == "<eos>") {
      throw VocabError("phone inventory: duplicate symbol '" + p + "'");
    }
    ids_[p] = static_cast<int64_t>(symbols_.size());
    symbols_.push_back(std::move(p));
  }
}

int64_t PhoneInventory::Id(const std::string& symbol) const {
  const auto it = ids_.find(symbol);
  if (it == ids_.end()) throw VocabError("unknown phone '" + symbol + "'");
  return it->second;
}

const std::string& PhoneInventory::Symbol(int64_t id) const {
  if (id < 0 || id >= size()) throw VocabError("phone id " + std::to_string(id) + " out of range");
  return symbols_[id];
}

std::string PhoneInventory::ToText(std::span<const int64_t> ids) const {
  std::string out;
  for (int64_t id : ids) {
    if (id < kNumSpecialPhones) continue;
    if (!out.empty()) out += ' ';
    out += Symbol(id);
  }
  return out;
}

std::vector<std::string> PhonemizeSymbols(const std::string& text, const Lexicon& lexicon,
                                          const PhonemizeOptions& options) {
  if (lexicon.empty()) throw InvalidArgumentError("phonemize: lexicon is empty");
  std::istringstream in(text);
  std::string word;
  std::vector<std::string> out;
  std::vector<std::string> oov;
  bool first = true;
  while (in >> word) {
    auto it = lexicon.find(word);
    if (it == lexicon.end()) {
      std::string lower = word;
      for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      it = lexicon.find(lower);
    }
    if (it == lexicon.end()) {
      oov.push_back(word);
      continue;
    }
    if (!first && options.word_boundary) out.push_back(*options.word_boundary);
    out.insert(out.end(), it->second.begin(), it->second.end());
    first = false;
  }
  if (!oov.empty() && options.oov == OovPolicy::kError) {
    std::string list;
    for (const std::string& w : oov) list += (list.empty() ? "" : ", ") + w;
    throw OovError("phonemize: out-of-vocabulary words: " + list);
  }
  return out;
}

std::vector<int64_t> Phonemize(const std::string& text, const Lexicon& lexicon,
                               const PhonemizeOptions& options, const PhoneInventory& inventory) {
  std::vector<int64_t> ids;
  for (const std::string& s : PhonemizeSymbols(text, lexicon, options)) ids.push_back(inventory.Id(s));
  return ids;
}

Lexicon ReadLexicon(const std::filesystem::path& path) {
  try {
    const nlohmann::json j = nlohmann::json::parse(ReadFileBytes(path));
    return j.get<Lexicon>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": bad lexicon: " + e.what());
  }
}

void WriteLexicon(const Lexicon& lexicon, const std::filesystem::path& path) {
  WriteFileBytes(path, nlohmann::json(lexicon).dump(1) + "\n");
}

PhoneInventory ReadInventory(const std::filesystem::path& path) {
  try {
    const nlohmann::json j = nlohmann::json::parse(ReadFileBytes(path));
    return PhoneInventory(j.get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": bad phone inventory: " + e.what());
  }
}

void WriteInventory(const PhoneInventory& inventory, const std::filesystem::path& path) {
  std::vector<std::string> phones(inventory.symbols().begin() + kNumSpecialPhones,
                                  inventory.symbols().end());
  WriteFileBytes(path, nlohmann::json(phones).dump() + "\n");
}

}  // namespace s2st::data
