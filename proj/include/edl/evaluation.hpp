// Copyright 2026 The EDL Authors.
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

#ifndef EDL_EVALUATION_HPP_
#define EDL_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "edl/corpus.hpp"

namespace edl::eval {

struct PrfScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Zero denominators give zero scores.
inline PrfScore make_prf(double correct_sys, size_t system, double correct_gold,
                         size_t gold) {
  PrfScore s;
  s.precision = system ? correct_sys / static_cast<double>(system) : 0.0;
  s.recall = gold ? correct_gold / static_cast<double>(gold) : 0.0;
  const double d = s.precision + s.recall;
  s.f1 = d > 0 ? 2 * s.precision * s.recall / d : 0.0;
  return s;
}

using MentionKey = decltype(mention_key(std::declval<Mention>()));
using SpanKey = std::tuple<std::string, size_t, size_t>;

inline SpanKey span_key(const Mention& m) { return {m.doc_id, m.char_start, m.char_end}; }

// Exact match on document, span, type and kind; duplicates count once.
inline PrfScore discovery_prf(const std::vector<Mention>& system,
                              const std::vector<Mention>& gold) {
  std::set<MentionKey> g, s;
  for (const auto& m : gold) g.insert(mention_key(m));
  for (const auto& m : system) s.insert(mention_key(m));
  size_t correct = 0;
  for (const auto& k : s) correct += g.count(k);
  return make_prf(static_cast<double>(correct), s.size(), static_cast<double>(correct),
                  g.size());
}

// Exact span plus the same kb_id, or NIL on both sides.
inline PrfScore strong_all_match(const std::vector<LinkedMention>& system,
                                 const std::vector<LinkedMention>& gold) {
  auto label = [](const LinkTarget& t) { return t.is_nil() ? std::string("\x01NIL") : t.id; };
  std::map<SpanKey, std::string> g, s;
  for (const auto& lm : gold) g.emplace(span_key(lm.mention), label(lm.target));
  for (const auto& lm : system) s.emplace(span_key(lm.mention), label(lm.target));
  size_t correct = 0;
  for (const auto& [k, v] : s) {
    auto it = g.find(k);
    if (it != g.end() && it->second == v) ++correct;
  }
  return make_prf(static_cast<double>(correct), s.size(), static_cast<double>(correct),
                  g.size());
}

struct Assignment {
  std::vector<int> row_to_col;  // -1 when unassigned
  double total = 0;
};

// Maximum-weight one-to-one assignment on a rectangular matrix, O(n^2 m).
inline Assignment hungarian(const std::vector<std::vector<double>>& w) {
  Assignment out;
  const size_t rows = w.size();
  out.row_to_col.assign(rows, -1);
  if (rows == 0 || w[0].empty()) return out;
  const size_t cols = w[0].size();
  for (const auto& r : w) {
    if (r.size() != cols) throw Error(ErrorCode::ShapeMismatch, "ragged matrix");
    for (double v : r)
      if (!std::isfinite(v)) throw Error(ErrorCode::MalformedInput, "non-finite weight");
  }
  // Square cost matrix: cost = max - w, padded with max (zero weight).
  const size_t n = std::max(rows, cols);
  double hi = 0;
  for (const auto& r : w)
    for (double v : r) hi = std::max(hi, v);
  auto cost = [&](size_t i, size_t j) {
    return (i < rows && j < cols) ? hi - w[i][j] : hi;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const size_t i0 = p[j0];
      double delta = inf;
      size_t j1 = 0;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (size_t j = 1; j <= n; ++j) {
    const size_t i = p[j];
    if (i >= 1 && i <= rows && j <= cols) {
      out.row_to_col[i - 1] = static_cast<int>(j - 1);
      out.total += w[i - 1][j - 1];
    }
  }
  return out;
}

// A cluster: its link label and the mention keys it holds.
struct Cluster {
  LinkTarget target;
  std::set<MentionKey> mentions;
};

// Groups by kb_id, or by NIL cluster id.
inline std::vector<Cluster> clusters_of(const std::vector<LinkedMention>& links) {
  std::map<std::pair<int, std::string>, Cluster> by_label;
  for (const auto& lm : links) {
    auto& c = by_label[{lm.target.is_nil() ? 1 : 0, lm.target.id}];
    c.target = lm.target;
    c.mentions.insert(mention_key(lm.mention));
  }
  std::vector<Cluster> out;
  for (auto& [_, c] : by_label) out.push_back(std::move(c));
  return out;
}

// Shared mentions of two clusters, zero unless both are NIL or both link to
// the same kb_id.
inline double ceaf_plus_similarity(const Cluster& g, const Cluster& s) {
  if (g.target.is_nil() != s.target.is_nil()) return 0;
  if (!g.target.is_nil() && g.target.id != s.target.id) return 0;
  double shared = 0;
  for (const auto& k : s.mentions) shared += g.mentions.count(k);
  return shared;
}

inline PrfScore typed_mention_ceaf_plus(const std::vector<LinkedMention>& system,
                                        const std::vector<LinkedMention>& gold) {
  const auto gc = clusters_of(gold), sc = clusters_of(system);
  std::vector<std::vector<double>> phi(gc.size(), std::vector<double>(sc.size()));
  for (size_t i = 0; i < gc.size(); ++i)
    for (size_t j = 0; j < sc.size(); ++j) phi[i][j] = ceaf_plus_similarity(gc[i], sc[j]);
  const double total = hungarian(phi).total;
  size_t n_sys = 0, n_gold = 0;
  for (const auto& c : sc) n_sys += c.mentions.size();
  for (const auto& c : gc) n_gold += c.mentions.size();
  return make_prf(total, n_sys, total, n_gold);
}

// ---------------------------------------------------------------------------
// Report

struct ReportRow {
  std::string metric;
  std::string lang;
  PrfScore score;
};

inline const char* kDiscovery = "entity_discovery";
inline const char* kStrongAllMatch = "strong_all_match";
inline const char* kCeafPlus = "typed_mention_ceaf_plus";

// Scores per language present in either input, then ALL. Mentions of
// documents missing from `languages` only count towards ALL.
inline std::vector<ReportRow> evaluate(const std::vector<LinkedMention>& system,
                                       const std::vector<LinkedMention>& gold,
                                       const std::map<std::string, Language>& languages) {
  auto lang_of = [&](const LinkedMention& lm) -> std::optional<Language> {
    auto it = languages.find(lm.mention.doc_id);
    if (it == languages.end()) return std::nullopt;
    return it->second;
  };
  std::vector<std::pair<std::string, std::vector<LinkedMention>>> sys_parts, gold_parts;
  std::vector<std::string> names;
  for (Language l : kAllLanguages) {
    std::vector<LinkedMention> s, g;
    for (const auto& lm : system)
      if (lang_of(lm) == l) s.push_back(lm);
    for (const auto& lm : gold)
      if (lang_of(lm) == l) g.push_back(lm);
    if (s.empty() && g.empty()) continue;
    names.push_back(to_string(l));
    sys_parts.emplace_back(to_string(l), std::move(s));
    gold_parts.emplace_back(to_string(l), std::move(g));
  }
  names.push_back("ALL");
  sys_parts.emplace_back("ALL", system);
  gold_parts.emplace_back("ALL", gold);

  auto mentions = [](const std::vector<LinkedMention>& v) {
    std::vector<Mention> out;
    for (const auto& lm : v) out.push_back(lm.mention);
    return out;
  };
  std::vector<ReportRow> rows;
  for (const char* metric : {kDiscovery, kStrongAllMatch, kCeafPlus}) {
    for (size_t i = 0; i < names.size(); ++i) {
      const auto& s = sys_parts[i].second;
      const auto& g = gold_parts[i].second;
      PrfScore score;
      if (metric == kDiscovery) score = discovery_prf(mentions(s), mentions(g));
      else if (metric == kStrongAllMatch) score = strong_all_match(s, g);
      else score = typed_mention_ceaf_plus(s, g);
      rows.push_back({metric, names[i], score});
    }
  }
  return rows;
}

// Tab-separated with three decimals:
//   metric  lang  P  R  F
inline void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "metric\tlang\tP\tR\tF\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%.3f\t%.3f\t%.3f\n", r.metric.c_str(),
                  r.lang.c_str(), r.score.precision, r.score.recall, r.score.f1);
    out << buf;
  }
}

}  // namespace edl::eval

#endif  // EDL_EVALUATION_HPP_
