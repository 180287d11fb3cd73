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

#ifndef S2ST_EVAL_DECODE_H_
#define S2ST_EVAL_DECODE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "s2st/data/record.h"

#include "s2st/model/translatotron.h"

namespace s2st::eval {

// Which prompt category an utterance is encoded with at evaluation time.
enum class PromptPolicy {
  kAuto,      // record category when the model has prompts, else none
  kNone,
  kCategory,  // record category
  kPrimary,
  kSecondary,
};

std::string_view PromptPolicyName(PromptPolicy p);
PromptPolicy ParsePromptPolicy(std::string_view s);
std::optional<model::PromptCategory> ResolvePrompt(PromptPolicy policy,
                                                   const model::Translatotron& model,
                                                   data::Category category);

struct DecodeConfig {
  enum class Mode { kGreedy, kBeam };
  Mode mode = Mode::kGreedy;
  int beam_size = 1;
  // Maximum number of emitted phones, EOS excluded.
  int max_len = 64;
  // Exponent of the ((5 + L) / 6) length penalty.
  double length_penalty = 0.6;

  // Throws ConfigError.
  void Validate() const;
};

// ((5 + length) / 6) ^ alpha.
double LengthPenalty(int64_t length, double alpha);

// Log-probabilities of the next symbol after `prefix` (which starts with
// BOS), one entry per vocabulary id.
std::vector<double> NextLogProbs(const model::Translatotron& model,
                                 const model::EncoderStates& enc, model::AuxTask which,
                                 std::span<const int64_t> prefix);

// Sum of log-probabilities of `phones` (no specials) followed by EOS when
// `finished` is set.
double SequenceLogProb(const model::Translatotron& model, const model::EncoderStates& enc,
                       model::AuxTask which, std::span<const int64_t> phones, bool finished);

// Decoded phone ids without specials. PAD and BOS are never emitted.
//  - greedy: argmax each step until EOS or max_len phones;
//  - beam: each step expands every live hypothesis by every emittable
//    symbol and keeps the beam_size best by log-probability (ties broken by
//    lower symbol ids); kept candidates ending in EOS retire. Hypotheses
//    alive at max_len retire unfinished. The result maximizes
//    log-probability / LengthPenalty(phones) over retired hypotheses.
// Beam with beam_size 1 reproduces greedy exactly.
std::vector<int64_t> DecodePhonemes(const model::Translatotron& model,
                                    const model::EncoderStates& enc, model::AuxTask which,
                                    const DecodeConfig& cfg);

}  // namespace s2st::eval

#endif  // S2ST_EVAL_DECODE_H_
