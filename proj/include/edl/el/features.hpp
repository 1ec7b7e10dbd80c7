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

#ifndef EDL_EL_FEATURES_HPP_
#define EDL_EL_FEATURES_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "edl/corpus.hpp"
#include "edl/el/candidates.hpp"
#include "edl/kb/edit_distance.hpp"
#include "edl/kb/knowledge_base.hpp"

namespace edl::el {

inline constexpr int kFeatureBins = 10;

inline int edit_bin(size_t distance) {
  return static_cast<int>(std::min<size_t>(kFeatureBins - 1, distance));
}

inline int similarity_bin(double sim) {
  const int b = static_cast<int>(std::floor(10.0 * sim));
  return std::clamp(b, 0, kFeatureBins - 1);
}

// Discrete inputs of the ranker for one (mention, candidate) pair. The
// learned embeddings and projections turn these into the 260-d vector.
struct RawFeatures {
  std::string kb_id;  // empty for Nil
  bool nil = false;
  std::vector<std::string> mention_words;
  std::vector<std::string> name_words;  // empty for Nil
  int type = 0;
  int category = 0;
  int hot = 0;
  int edit = kFeatureBins - 1;
  int tfidf = 0;
  int translation = kFeatureBins - 1;

  bool operator==(const RawFeatures&) const = default;
};

inline std::vector<std::string> feature_words(std::string_view s) {
  return text::words(text::normalize(s));
}

// Smallest word-level edit distance between `s` and any name of the entity.
inline size_t name_distance(std::string_view s, const kb::KbEntity& e) {
  const std::string q = text::normalize(s);
  size_t best = word_edit_distance(q, text::normalize(e.canonical_name));
  for (const auto& a : e.aliases)
    best = std::min(best, word_edit_distance(q, text::normalize(a)));
  return best;
}

inline RawFeatures extract_features(const Mention& m, const Document& doc,
                                    const Candidate& c, const kb::KnowledgeBase& kb) {
  RawFeatures f;
  f.nil = c.nil;
  f.mention_words = feature_words(m.surface);
  f.type = static_cast<int>(m.entity_type);
  f.category = static_cast<int>(doc.category);
  if (c.nil) return f;

  const kb::KbEntity* e = kb.find(c.kb_id);
  if (!e) throw Error(ErrorCode::UnknownCandidate, c.kb_id);
  f.kb_id = e->kb_id;
  f.name_words = feature_words(e->canonical_name);
  f.hot = kb::hot_bin(e->links_count);
  f.edit = edit_bin(name_distance(m.surface, *e));
  f.tfidf = similarity_bin(kb.description_similarity(doc.text, e->kb_id));
  std::optional<std::string> translated;
  if (doc.language == Language::ENG) translated = m.surface;
  else translated = kb.aux().translate(m.surface);
  if (translated) {
    const std::string& target = e->english_name ? *e->english_name : e->canonical_name;
    f.translation = edit_bin(word_edit_distance(text::normalize(*translated),
                                                text::normalize(target)));
  }
  return f;
}

inline std::vector<RawFeatures> extract_features(const Mention& m, const Document& doc,
                                                 const CandidateList& list,
                                                 const kb::KnowledgeBase& kb) {
  std::vector<RawFeatures> out;
  out.reserve(list.size());
  for (const auto& c : list.items) out.push_back(extract_features(m, doc, c, kb));
  return out;
}

}  // namespace edl::el

#endif  // EDL_EL_FEATURES_HPP_
