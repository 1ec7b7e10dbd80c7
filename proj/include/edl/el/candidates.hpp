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

#ifndef EDL_EL_CANDIDATES_HPP_
#define EDL_EL_CANDIDATES_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "edl/corpus.hpp"
#include "edl/el/queries.hpp"
#include "edl/kb/knowledge_base.hpp"

namespace edl::el {

struct Candidate {
  bool nil = false;
  std::string kb_id;

  static Candidate kb(std::string id) { return {false, std::move(id)}; }
  static Candidate nil_candidate() { return {true, {}}; }
  bool operator==(const Candidate&) const = default;
};

inline std::string to_string(const Candidate& c) { return c.nil ? "NIL" : c.kb_id; }

// Kb entries are unique and Nil is always present, last.
struct CandidateList {
  std::vector<Candidate> items;
  std::vector<std::string> queries;
  std::map<std::string, double> result1;  // kb_id -> best query score

  size_t size() const { return items.size(); }
  size_t kb_count() const { return items.size() - 1; }
  bool contains(const std::string& kb_id) const {
    return std::any_of(items.begin(), items.end(), [&](const Candidate& c) {
      return !c.nil && c.kb_id == kb_id;
    });
  }
  std::optional<size_t> index_of(const LinkTarget& t) const {
    for (size_t i = 0; i < items.size(); ++i) {
      if (t.is_nil() ? items[i].nil : (!items[i].nil && items[i].kb_id == t.id))
        return i;
    }
    return std::nullopt;
  }
};

struct CandidateConfig {
  size_t top_n_eng = 3;
  size_t top_n_spa = 3;
  size_t top_n_cmn = 30;

  size_t top_n(Language lang) const {
    switch (lang) {
      case Language::ENG: return top_n_eng;
      case Language::SPA: return top_n_spa;
      case Language::CMN: return top_n_cmn;
    }
    return top_n_eng;
  }
};

// Result1: every query's exact and fuzzy hits, each entity keeping its best
// score (exact hits score 1). Ordered by score, links_count, kb_id.
inline std::vector<kb::ScoredEntity> result1(const std::vector<std::string>& queries,
                                             const kb::KnowledgeBase& kb) {
  std::map<std::string, double> best;
  auto offer = [&](const std::string& id, double s) {
    auto [it, inserted] = best.try_emplace(id, s);
    if (!inserted) it->second = std::max(it->second, s);
  };
  for (const auto& q : queries) {
    for (const auto& id : kb.exact_lookup(q)) offer(id, 1.0);
    for (const auto& hit : kb.fuzzy_search(q)) offer(hit.kb_id, hit.score);
  }
  std::vector<kb::ScoredEntity> out;
  for (const auto& [id, s] : best) out.push_back({id, s});
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto la = kb.at(a.kb_id).links_count, lb = kb.at(b.kb_id).links_count;
    if (la != lb) return la > lb;
    return a.kb_id < b.kb_id;
  });
  return out;
}

// topN(Result1) + (Result1 and Result2) + exact title matches + Nil.
inline CandidateList candidates_for_queries(const std::vector<std::string>& queries,
                                            const Document& doc,
                                            const kb::KnowledgeBase& kb,
                                            const CandidateConfig& cfg = {}) {
  CandidateList list;
  list.queries = queries;
  const auto r1 = result1(queries, kb);
  for (const auto& e : r1) list.result1[e.kb_id] = e.score;
  std::set<std::string> r2;
  if (!r1.empty())
    for (const auto& e : kb.document_search(doc.text)) r2.insert(e.kb_id);

  std::set<std::string> taken;
  auto take = [&](const std::string& id) {
    if (taken.insert(id).second) list.items.push_back(Candidate::kb(id));
  };
  const size_t n = cfg.top_n(doc.language);
  for (size_t i = 0; i < r1.size() && i < n; ++i) take(r1[i].kb_id);
  for (const auto& e : r1)
    if (r2.count(e.kb_id)) take(e.kb_id);
  for (const auto& q : queries)
    for (const auto& id : kb.exact_lookup(q)) take(id);
  list.items.push_back(Candidate::nil_candidate());
  return list;
}

inline CandidateList generate_candidates(const Mention& m, const Document& doc,
                                         const std::vector<Mention>& doc_mentions,
                                         const kb::KnowledgeBase& kb,
                                         const CandidateConfig& cfg = {}) {
  QueryList queries = expand_queries(m, doc_mentions, kb.aux());
  return candidates_for_queries(queries.items(), doc, kb, cfg);
}

struct CandidateMetrics {
  double coverage = 0;
  double avg_count = 0;
  size_t lists = 0;
};

// Over non-NIL gold mentions: fraction of lists holding the gold id, and mean
// list size without Nil. `lists[i]` belongs to `gold[i]`; NIL golds are
// skipped.
inline CandidateMetrics candidate_metrics(const std::vector<GoldLink>& gold,
                                          const std::vector<CandidateList>& lists) {
  if (gold.size() != lists.size())
    throw Error(ErrorCode::ShapeMismatch, "one candidate list per gold mention");
  CandidateMetrics m;
  size_t covered = 0, total_size = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].target.is_nil()) continue;
    ++m.lists;
    covered += lists[i].contains(gold[i].target.id) ? 1 : 0;
    total_size += lists[i].kb_count();
  }
  if (m.lists == 0) throw Error(ErrorCode::EmptyInput, "no non-NIL gold mentions");
  m.coverage = static_cast<double>(covered) / static_cast<double>(m.lists);
  m.avg_count = static_cast<double>(total_size) / static_cast<double>(m.lists);
  return m;
}

// Coverage and average candidate count per language, one row each, as
//   Language  Coverage  AvgCount
//   ENG       0.930     22.60
inline void write_candidate_report(
    std::ostream& out, const std::vector<std::pair<std::string, CandidateMetrics>>& rows) {
  out << "Language\tCoverage\tAvgCount\n";
  for (const auto& [label, m] : rows) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s\t%.3f\t%.2f\n", label.c_str(), m.coverage,
                  m.avg_count);
    out << buf;
  }
}

inline void write_candidate_report(
    std::ostream& out, const std::vector<std::pair<Language, CandidateMetrics>>& rows) {
  std::vector<std::pair<std::string, CandidateMetrics>> named;
  for (const auto& [lang, m] : rows) named.emplace_back(to_string(lang), m);
  write_candidate_report(out, named);
}

}  // namespace edl::el

#endif  // EDL_EL_CANDIDATES_HPP_
