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

#include "s2st/eval/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "s2st/common/error.h"

namespace s2st::eval {

namespace {

template <typename T>
EditCounts Align(std::span<const T> ref, std::span<const T> hyp) {
  const size_t n = ref.size(), m = hyp.size();
  // cost[i][j] with backtrace through operation counts.
  std::vector<std::vector<EditCounts>> best(n + 1, std::vector<EditCounts>(m + 1));
  for (size_t i = 1; i <= n; ++i) best[i][0].deletions = static_cast<int64_t>(i);
  for (size_t j = 1; j <= m; ++j) best[0][j].insertions = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      EditCounts diag = best[i - 1][j - 1];
      if (!(ref[i - 1] == hyp[j - 1])) ++diag.substitutions;
      EditCounts del = best[i - 1][j];
      ++del.deletions;
      EditCounts ins = best[i][j - 1];
      ++ins.insertions;
      EditCounts pick = diag;
      if (del.distance() < pick.distance()) pick = del;
      if (ins.distance() < pick.distance()) pick = ins;
      best[i][j] = pick;
    }
  }
  return best[n][m];
}

std::vector<std::string> SplitUtf8(const std::string& text) {
  std::vector<std::string> out;
  for (size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    len = std::min(len, text.size() - i);
    if (!std::isspace(c)) out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<double> Ranks(std::span<const double> v) {
  std::vector<size_t> order(v.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

EditCounts AlignSequences(std::span<const int64_t> ref, std::span<const int64_t> hyp) {
  return Align(ref, hyp);
}

EditCounts AlignSequences(std::span<const std::string> ref, std::span<const std::string> hyp) {
  return Align(ref, hyp);
}

double PhonemeErrorRate(std::span<const int64_t> ref, std::span<const int64_t> hyp) {
  if (ref.empty()) throw UndefinedError("PER is undefined for an empty reference");
  return static_cast<double>(AlignSequences(ref, hyp).distance()) /
         static_cast<double>(ref.size());
}

std::string_view BleuModeName(BleuMode m) {
  switch (m) {
    case BleuMode::kWordCiDetok: return "word";
    case BleuMode::kChar: return "char";
    case BleuMode::kPhone: return "phone";
  }
  return "?";
}

BleuMode ParseBleuMode(std::string_view s) {
  if (s == "word") return BleuMode::kWordCiDetok;
  if (s == "char") return BleuMode::kChar;
  if (s == "phone") return BleuMode::kPhone;
  throw ConfigError("unknown BLEU mode '" + std::string(s) + "' (word, char or phone)");
}

std::vector<std::string> BleuTokenize(const std::string& text, BleuMode mode) {
  if (mode == BleuMode::kChar) return SplitUtf8(text);
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (mode == BleuMode::kWordCiDetok && std::ispunct(c) && c != '\'' && c != '-') {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur += mode == BleuMode::kWordCiDetok ? static_cast<char>(std::tolower(c)) : ch;
    }
  }
  flush();
  return out;
}

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (int n = 0; n < 4; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

BleuStats SegmentBleuStats(std::span<const std::string> hyp, std::span<const std::string> ref) {
  BleuStats s;
  s.hyp_len = static_cast<int64_t>(hyp.size());
  s.ref_len = static_cast<int64_t>(ref.size());
  for (size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, int64_t> ref_counts, hyp_counts;
    for (size_t i = 0; i + n <= ref.size(); ++i) {
      ref_counts[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)]++;
    }
    for (size_t i = 0; i + n <= hyp.size(); ++i) {
      hyp_counts[std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n)]++;
    }
    int64_t total = 0, match = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      const auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) match += std::min(count, it->second);
    }
    s.matches[n - 1] = match;
    s.totals[n - 1] = total;
  }
  return s;
}

double BleuFromStats(const BleuStats& s) {
  if (s.hyp_len == 0 || s.matches[0] == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < 4; ++n) {
    double p;
    if (n > 0 && s.matches[n] == 0) {
      p = 1.0 / (static_cast<double>(s.totals[n]) + 1.0);
    } else {
      p = static_cast<double>(s.matches[n]) / static_cast<double>(s.totals[n]);
    }
    log_sum += std::log(p);
  }
  const double bp = s.hyp_len < s.ref_len
                        ? std::exp(1.0 - static_cast<double>(s.ref_len) / s.hyp_len)
                        : 1.0;
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

double CorpusBleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                  BleuMode mode) {
  if (hyps.size() != refs.size()) {
    throw ContractError("BLEU: " + std::to_string(hyps.size()) + " hypotheses for " +
                        std::to_string(refs.size()) + " references");
  }
  if (hyps.empty()) throw ContractError("BLEU: no segments");
  BleuStats total;
  for (size_t i = 0; i < hyps.size(); ++i) {
    total += SegmentBleuStats(BleuTokenize(hyps[i], mode), BleuTokenize(refs[i], mode));
  }
  return BleuFromStats(total);
}

double SpearmanCorrelation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("Spearman: length mismatch");
  if (a.size() < 2) throw UndefinedError("Spearman: fewer than two points");
  const std::vector<double> ra = Ranks(a), rb = Ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double num = 0, da = 0, db = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  if (da == 0 || db == 0) throw UndefinedError("Spearman: constant input");
  return num / std::sqrt(da * db);
}

}  // namespace s2st::eval
