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

#ifndef EDL_EL_QUERIES_HPP_
#define EDL_EL_QUERIES_HPP_

#include <set>
#include <string>
#include <vector>

#include "edl/corpus.hpp"
#include "edl/kb/knowledge_base.hpp"
#include "edl/utf8.hpp"

namespace edl::el {

// Ordered query strings, unique up to normalization.
class QueryList {
 public:
  bool add(const std::string& q) {
    std::string key = text::normalize(q);
    if (key.empty() || !seen_.insert(key).second) return false;
    items_.push_back(q);
    return true;
  }
  const std::vector<std::string>& items() const { return items_; }
  size_t size() const { return items_.size(); }
  bool contains(const std::string& q) const {
    return seen_.count(text::normalize(q)) > 0;
  }

 private:
  std::vector<std::string> items_;
  std::set<std::string> seen_;
};

// Distance between span midpoints, doubled to stay integral.
inline size_t char_distance(const Mention& a, const Mention& b) {
  const size_t ma = a.char_start + a.char_end, mb = b.char_start + b.char_end;
  return ma > mb ? ma - mb : mb - ma;
}

// Nearest named mention of the same document; earlier wins ties.
inline const Mention* nearest_named(const Mention& m,
                                    const std::vector<Mention>& doc_mentions) {
  const Mention* best = nullptr;
  size_t best_dist = 0;
  for (const auto& other : doc_mentions) {
    if (other.kind != MentionKind::NAM || other.doc_id != m.doc_id) continue;
    if (other.char_start == m.char_start && other.char_end == m.char_end) continue;
    const size_t d = char_distance(m, other);
    if (!best || d < best_dist ||
        (d == best_dist && other.char_start < best->char_start)) {
      best = &other;
      best_dist = d;
    }
  }
  return best;
}

namespace detail {

// Longer mentions of the document whose text contains `base`, in document
// order.
inline void add_longer_mentions(const std::string& base,
                                const std::vector<Mention>& doc_mentions,
                                QueryList& out) {
  const std::string key = text::normalize(base);
  if (key.empty()) return;
  const size_t len = text::length(key);
  for (const auto& other : doc_mentions) {
    const std::string o = text::normalize(other.surface);
    if (text::length(o) > len && o.find(key) != std::string::npos)
      out.add(other.surface);
  }
}

inline void add_expansions(const std::string& base, const kb::AuxTables& aux,
                           QueryList& out) {
  for (const auto& full : aux.expansions(base)) out.add(full);
}

}  // namespace detail

// Query expansion for one mention. `doc_mentions` are all mentions of its
// document (it may include the mention itself).
//  1. the surface;
//  5. for a nominal mention, the nearest named mention, which replaces the
//     surface as the base of rules 2 and 4;
//  2. longer mentions containing the base;
//  3. the other Chinese script of every query so far;
//  4. abbreviation expansions of the surface and the base;
//  6. the translation of the surface (and base), itself run through 2 and 4.
inline QueryList expand_queries(const Mention& m,
                                const std::vector<Mention>& doc_mentions,
                                const kb::AuxTables& aux) {
  QueryList out;
  out.add(m.surface);
  std::vector<std::string> bases = {m.surface};
  if (m.kind == MentionKind::NOM) {
    if (const Mention* named = nearest_named(m, doc_mentions)) {
      out.add(named->surface);
      bases = {named->surface};
    }
  }
  for (const auto& b : bases) detail::add_longer_mentions(b, doc_mentions, out);
  const std::vector<std::string> so_far = out.items();
  for (const auto& q : so_far)
    if (auto v = aux.zh_variant(q)) out.add(*v);
  detail::add_expansions(m.surface, aux, out);
  for (const auto& b : bases) detail::add_expansions(b, aux, out);

  std::vector<std::string> sources = {m.surface};
  for (const auto& b : bases) sources.push_back(b);
  for (const auto& src : sources) {
    auto t = aux.translate(src);
    if (!t) continue;
    out.add(*t);
    detail::add_longer_mentions(*t, doc_mentions, out);
    detail::add_expansions(*t, aux, out);
  }
  return out;
}

}  // namespace edl::el

#endif  // EDL_EL_QUERIES_HPP_
