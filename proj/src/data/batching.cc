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

#include "s2st/data/batching.h"

#include <algorithm>
#include <numeric>

#include "s2st/common/error.h"

namespace s2st::data {

std::vector<Batch> BatchByTokens(const CorpusManifest& manifest, int64_t max_tokens,
                                 bool sort_by_length, std::vector<std::string>* warnings) {
  if (max_tokens < 1) throw ConfigError("batching: max_tokens must be >= 1");
  const auto& records = manifest.records;
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  if (sort_by_length) {
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return records[a].src_frames < records[b].src_frames;
    });
  }
  std::vector<Batch> batches;
  Batch current;
  const auto flush = [&] {
    if (!current.indices.empty()) batches.push_back(std::move(current));
    current = Batch{};
  };
  for (const size_t i : order) {
    const int64_t frames = records[i].src_frames;
    if (frames < 0) throw ContractError("batching: negative src_frames for '" + records[i].id + "'");
    if (frames > max_tokens) {
      flush();
      batches.push_back(Batch{{i}, frames, true});
      if (warnings) {
        warnings->push_back("record '" + records[i].id + "' has " + std::to_string(frames) +
                            " frames, above the batch cap of " + std::to_string(max_tokens) +
                            "; batched alone");
      }
      continue;
    }
    if (current.tokens + frames > max_tokens) flush();
    current.indices.push_back(i);
    current.tokens += frames;
  }
  flush();
  return batches;
}

}  // namespace s2st::data
