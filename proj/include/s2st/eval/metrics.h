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

#ifndef S2ST_EVAL_METRICS_H_
#define S2ST_EVAL_METRICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace s2st::eval {

// Operation counts of one minimal edit path.
struct EditCounts {
  int64_t substitutions = 0;
  int64_t insertions = 0;
  int64_t deletions = 0;
  int64_t distance() const { return substitutions + insertions + deletions; }
};

// Levenshtein alignment with unit costs. Among minimal paths the counts of
// the one preferring substitutions, then deletions, are reported.
EditCounts AlignSequences(std::span<const int64_t> ref, std::span<const int64_t> hyp);
EditCounts AlignSequences(std::span<const std::string> ref, std::span<const std::string> hyp);

// Edit distance over reference length; may exceed 1. An empty reference
// raises UndefinedError.
double PhonemeErrorRate(std::span<const int64_t> ref, std::span<const int64_t> hyp);

enum class BleuMode {
  kWordCiDetok,  // lowercased words with punctuation split off
  kChar,         // every non-space character (UTF-8 code point)
  kPhone,        // whitespace-separated symbols, case kept
};

std::string_view BleuModeName(BleuMode m);
BleuMode ParseBleuMode(std::string_view s);

std::vector<std::string> BleuTokenize(const std::string& text, BleuMode mode);

// Clipped n-gram matches and totals for n = 1..4 plus lengths; sums over
// segments give corpus statistics.
struct BleuStats {
  std::array<int64_t, 4> matches{};
  std::array<int64_t, 4> totals{};
  int64_t hyp_len = 0;
  int64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& o);
};

BleuStats SegmentBleuStats(std::span<const std::string> hyp, std::span<const std::string> ref);

// BLEU-4 in [0, 100] with brevity penalty exp(1 - r/h) when h < r. A zero
// match count for n >= 2 is smoothed to 1 / (total + 1); zero unigram
// matches give 0.
double BleuFromStats(const BleuStats& stats);

// Corpus BLEU with pooled statistics. Count mismatch or no segments raise
// ContractError.
double CorpusBleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                  BleuMode mode);

// Spearman rank correlation with average ranks for ties. Fewer than two
// points or a constant input raise UndefinedError.
double SpearmanCorrelation(std::span<const double> a, std::span<const double> b);

}  // namespace s2st::eval

#endif  // S2ST_EVAL_METRICS_H_
