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

#include "s2st/eval/decode.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "s2st/common/error.h"
#include "s2st/common/phones.h"
#include "s2st/nd/tensor.h"

namespace s2st::eval {

namespace {

struct Hyp {
  std::vector<int64_t> prefix;  // starts with BOS
  double log_prob = 0.0;
};

bool Emittable(int64_t id) { return id != kPadId && id != kBosId; }

}  // namespace

std::string_view PromptPolicyName(PromptPolicy p) {
  switch (p) {
    case PromptPolicy::kAuto: return "auto";
    case PromptPolicy::kNone: return "none";
    case PromptPolicy::kCategory: return "category";
    case PromptPolicy::kPrimary: return "primary";
    case PromptPolicy::kSecondary: return "secondary";
  }
  return "?";
}

PromptPolicy ParsePromptPolicy(std::string_view s) {
  for (PromptPolicy p : {PromptPolicy::kAuto, PromptPolicy::kNone, PromptPolicy::kCategory,
                         PromptPolicy::kPrimary, PromptPolicy::kSecondary}) {
    if (PromptPolicyName(p) == s) return p;
  }
  throw ConfigError("unknown prompt policy '" + std::string(s) +
                    "' (expected auto, none, category, primary or secondary)");
}

std::optional<model::PromptCategory> ResolvePrompt(PromptPolicy policy,
                                                   const model::Translatotron& model,
                                                   data::Category category) {
  const auto from_category = category == data::Category::kPrimary
                                 ? model::PromptCategory::kPrimary
                                 : model::PromptCategory::kSecondary;
  switch (policy) {
    case PromptPolicy::kAuto:
      if (!model.config().prompt_enabled) return std::nullopt;
      return from_category;
    case PromptPolicy::kNone: return std::nullopt;
    case PromptPolicy::kCategory: return from_category;
    case PromptPolicy::kPrimary: return model::PromptCategory::kPrimary;
    case PromptPolicy::kSecondary: return model::PromptCategory::kSecondary;
  }
  return std::nullopt;
}

void DecodeConfig::Validate() const {
  if (beam_size < 1) throw ConfigError("decode.beam_size: must be >= 1");
  if (max_len < 0) throw ConfigError("decode.max_len: must be >= 0");
  if (mode == Mode::kGreedy && beam_size != 1) {
    throw ConfigError("decode.beam_size: greedy decoding uses beam_size 1");
  }
}

double LengthPenalty(int64_t length, double alpha) {
  return std::pow((5.0 + static_cast<double>(length)) / 6.0, alpha);
}

std::vector<double> NextLogProbs(const model::Translatotron& model,
                                 const model::EncoderStates& enc, model::AuxTask which,
                                 std::span<const int64_t> prefix) {
  nd::NoGradGuard no_grad;
  model::RunContext ctx = model::RunContext::Inference();
  const nd::Tensor logits = model.DecodeAuxiliary(enc, which, prefix, ctx);
  const int64_t v = logits.dim(1);
  const int64_t last = logits.dim(0) - 1;
  std::vector<double> row(logits.data().begin() + last * v, logits.data().begin() + (last + 1) * v);
  const double mx = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (double x : row) sum += std::exp(x - mx);
  const double lse = mx + std::log(sum);
  for (double& x : row) x -= lse;
  return row;
}

double SequenceLogProb(const model::Translatotron& model, const model::EncoderStates& enc,
                       model::AuxTask which, std::span<const int64_t> phones, bool finished) {
  std::vector<int64_t> prefix = {kBosId};
  double lp = 0.0;
  for (int64_t p : phones) {
    lp += NextLogProbs(model, enc, which, prefix)[p];
    prefix.push_back(p);
  }
  if (finished) lp += NextLogProbs(model, enc, which, prefix)[kEosId];
  return lp;
}

std::vector<int64_t> DecodePhonemes(const model::Translatotron& model,
                                    const model::EncoderStates& enc, model::AuxTask which,
                                    const DecodeConfig& cfg) {
  cfg.Validate();
  if (cfg.mode == DecodeConfig::Mode::kGreedy) {
    std::vector<int64_t> prefix = {kBosId};
    for (int t = 0; t < cfg.max_len; ++t) {
      const std::vector<double> lp = NextLogProbs(model, enc, which, prefix);
      int64_t best = -1;
      for (int64_t id = 0; id < static_cast<int64_t>(lp.size()); ++id) {
        if (Emittable(id) && (best < 0 || lp[id] > lp[best])) best = id;
      }
      if (best == kEosId) break;
      prefix.push_back(best);
    }
    return std::vector<int64_t>(prefix.begin() + 1, prefix.end());
  }

  std::vector<Hyp> live = {Hyp{{kBosId}, 0.0}};
  std::vector<std::pair<Hyp, bool>> retired;  // (hypothesis, ended with EOS)
  for (int t = 0; t < cfg.max_len && !live.empty(); ++t) {
    struct Cand {
      size_t parent;
      int64_t id;
      double log_prob;
    };
    std::vector<Cand> cands;
    for (size_t h = 0; h < live.size(); ++h) {
      const std::vector<double> lp = NextLogProbs(model, enc, which, live[h].prefix);
      for (int64_t id = 0; id < static_cast<int64_t>(lp.size()); ++id) {
        if (Emittable(id)) cands.push_back({h, id, live[h].log_prob + lp[id]});
      }
    }
    // Live hypotheses are kept in rank order, so (parent, id) order is the
    // deterministic tie-break.
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.log_prob > b.log_prob; });
    std::vector<Hyp> next;
    const size_t keep = std::min(cands.size(), static_cast<size_t>(cfg.beam_size));
    for (size_t k = 0; k < keep; ++k) {
      const Cand& c = cands[k];
      Hyp h{live[c.parent].prefix, c.log_prob};
      if (c.id == kEosId) {
        retired.emplace_back(std::move(h), true);
      } else {
        h.prefix.push_back(c.id);
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }
  for (Hyp& h : live) retired.emplace_back(std::move(h), false);
  const std::pair<Hyp, bool>* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& r : retired) {
    const int64_t len = static_cast<int64_t>(r.first.prefix.size()) - 1;
    const double score = r.first.log_prob / LengthPenalty(len, cfg.length_penalty);
    if (best == nullptr || score > best_score) {
      best = &r;
      best_score = score;
    }
  }
  return std::vector<int64_t>(best->first.prefix.begin() + 1, best->first.prefix.end());
}

}  // namespace s2st::eval
