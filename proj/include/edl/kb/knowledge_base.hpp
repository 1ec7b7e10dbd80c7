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

#ifndef EDL_KB_KNOWLEDGE_BASE_HPP_
#define EDL_KB_KNOWLEDGE_BASE_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "edl/common.hpp"
#include "edl/kb/edit_distance.hpp"
#include "edl/utf8.hpp"

namespace edl::kb {

struct KbEntity {
  std::string kb_id;
  std::string canonical_name;
  std::vector<std::string> aliases;
  std::uint64_t links_count = 0;
  std::string description;
  std::vector<std::string> redirect_titles;
  std::vector<std::string> disambiguation_titles;
  std::optional<std::string> english_name;
};

inline int hot_bin(std::uint64_t links_count) {
  if (links_count == std::numeric_limits<std::uint64_t>::max()) return 9;
  const int bits = static_cast<int>(std::bit_width(links_count + 1)) - 1;
  return std::min(9, bits);
}

// Auxiliary lookup tables for query expansion. Keys are normalized.
class AuxTables {
 public:
  void add_abbreviation(std::string_view abbr, std::string_view full) {
    abbreviations_[text::normalize(abbr)].insert(std::string(full));
  }
  // Registers both directions.
  void add_zh_variant(std::string_view simplified, std::string_view traditional) {
    std::string s(simplified), t(traditional);
    zh_[s] = t;
    zh_.try_emplace(t, s);
  }
  void add_translation(std::string_view source, std::string_view english) {
    translations_[text::normalize(source)] = std::string(english);
  }

  std::vector<std::string> expansions(std::string_view abbr) const {
    auto it = abbreviations_.find(text::normalize(abbr));
    if (it == abbreviations_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

  // The other-script form of a Chinese name: whole-string entry if present,
  // otherwise character by character. Returns nullopt when nothing changes.
  std::optional<std::string> zh_variant(std::string_view name) const {
    if (auto it = zh_.find(std::string(name)); it != zh_.end()) return it->second;
    std::string out;
    bool changed = false;
    for (char32_t c : text::decode(name)) {
      std::string ch;
      text::append_utf8(ch, c);
      auto it = zh_.find(ch);
      if (it != zh_.end()) {
        out += it->second;
        changed = true;
      } else {
        out += ch;
      }
    }
    if (!changed) return std::nullopt;
    return out;
  }

  std::optional<std::string> translate(std::string_view source) const {
    auto it = translations_.find(text::normalize(source));
    if (it == translations_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::string, std::set<std::string>>& abbreviations() const {
    return abbreviations_;
  }
  const std::map<std::string, std::string>& zh_variants() const { return zh_; }
  const std::map<std::string, std::string>& translations() const {
    return translations_;
  }

 private:
  std::map<std::string, std::set<std::string>> abbreviations_;
  std::map<std::string, std::string> zh_;
  std::map<std::string, std::string> translations_;
};

struct ScoredEntity {
  std::string kb_id;
  double score = 0;

  bool operator==(const ScoredEntity&) const = default;
};

inline constexpr size_t kUnlimited = std::numeric_limits<size_t>::max();

// Single-word fuzzy queries also reach names with a word within this many
// character edits.
inline constexpr size_t kFuzzyWordDistance = 2;

// In-memory KB with exact, fuzzy and description-similarity access paths.
// Immutable after construction, so concurrent reads are safe.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  explicit KnowledgeBase(std::vector<KbEntity> entities, AuxTables aux = {})
      : entities_(std::move(entities)), aux_(std::move(aux)) {
    std::sort(entities_.begin(), entities_.end(),
              [](const KbEntity& a, const KbEntity& b) { return a.kb_id < b.kb_id; });
    for (size_t i = 0; i < entities_.size(); ++i) {
      auto& e = entities_[i];
      if (i > 0 && entities_[i - 1].kb_id == e.kb_id)
        throw Error(ErrorCode::DuplicateKbId, e.kb_id);
      if (std::find(e.aliases.begin(), e.aliases.end(), e.canonical_name) ==
          e.aliases.end())
        e.aliases.insert(e.aliases.begin(), e.canonical_name);
      by_id_.emplace(e.kb_id, static_cast<std::uint32_t>(i));
    }
    index_names();
    index_descriptions();
  }

  size_t size() const { return entities_.size(); }
  const std::vector<KbEntity>& entities() const { return entities_; }
  const AuxTables& aux() const { return aux_; }

  const KbEntity* find(std::string_view kb_id) const {
    auto it = by_id_.find(std::string(kb_id));
    return it == by_id_.end() ? nullptr : &entities_[it->second];
  }
  const KbEntity& at(std::string_view kb_id) const {
    const KbEntity* e = find(kb_id);
    if (!e) throw Error(ErrorCode::UnknownCandidate, std::string(kb_id));
    return *e;
  }
  int hot(std::string_view kb_id) const { return hot_bin(at(kb_id).links_count); }

  // Ids whose alias, redirect title or disambiguation title normalizes to
  // the same string as `name`, sorted.
  std::vector<std::string> exact_lookup(std::string_view name) const {
    std::vector<std::string> out;
    auto it = name_ids_.find(text::normalize(name));
    if (it == name_ids_.end()) return out;
    for (std::uint32_t e : names_[it->second].entities)
      out.push_back(entities_[e].kb_id);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Names sharing a word with the query (or, for one-word queries, having a
  // word within kFuzzyWordDistance edits) scored by
  // 1 - char_edit_distance / max length over normalized strings. Each entity
  // keeps its best name. Ties: more links first, then kb_id.
  std::vector<ScoredEntity> fuzzy_search(std::string_view query,
                                         size_t limit = kUnlimited) const {
    if (limit == 0) throw Error(ErrorCode::InvalidConfig, "limit must be >= 1");
    const std::string q = text::normalize(query);
    if (q.empty()) return {};
    const std::u32string q32 = text::decode(q);
    const auto q_words = text::words(q);

    std::set<std::uint32_t> name_hits;
    for (const auto& w : q_words) {
      auto it = word_names_.find(w);
      if (it != word_names_.end()) name_hits.insert(it->second.begin(), it->second.end());
    }
    if (q_words.size() == 1) {
      const std::u32string w32 = text::decode(q_words[0]);
      for (const auto& [word, names] : word_names_) {
        if (edit_distance_within(w32, text::decode(word), kFuzzyWordDistance))
          name_hits.insert(names.begin(), names.end());
      }
    }

    std::unordered_map<std::uint32_t, double> best;
    for (std::uint32_t n : name_hits) {
      const auto& name = names_[n];
      const double len = static_cast<double>(std::max(q32.size(), name.chars.size()));
      const double score =
          1.0 - static_cast<double>(edit_distance(q32, name.chars)) / len;
      for (std::uint32_t e : name.entities) {
        auto [it, inserted] = best.try_emplace(e, score);
        if (!inserted) it->second = std::max(it->second, score);
      }
    }
    return ranked(best, limit);
  }

  // Cosine similarity between tf-idf vectors of `text` and of each entity
  // description; only positive scores are returned.
  std::vector<ScoredEntity> document_search(std::string_view text,
                                            size_t limit = kUnlimited) const {
    if (limit == 0) throw Error(ErrorCode::InvalidConfig, "limit must be >= 1");
    std::map<std::string, double> tf;
    for (auto& t : text::terms(text)) tf[t] += 1.0;
    double q_norm_sq = 0;
    std::unordered_map<std::uint32_t, double> dot;
    for (const auto& [term, count] : tf) {
      auto it = postings_.find(term);
      if (it == postings_.end()) continue;
      const double w = count * it->second.idf;
      q_norm_sq += w * w;
      for (const auto& [e, ew] : it->second.entries) dot[e] += w * ew;
    }
    std::unordered_map<std::uint32_t, double> scores;
    if (q_norm_sq > 0) {
      const double q_norm = std::sqrt(q_norm_sq);
      for (const auto& [e, d] : dot) {
        const double s = d / (q_norm * desc_norm_[e]);
        if (s > 0) scores[e] = std::min(1.0, s);
      }
    }
    return ranked(scores, limit);
  }

  double idf(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0.0 : it->second.idf;
  }

  // tf-idf weights of an entity description (terms absent from every
  // description carry no weight).
  std::map<std::string, double> description_vector(std::string_view kb_id) const {
    std::map<std::string, double> v;
    for (auto& t : text::terms(at(kb_id).description)) v[t] += 1.0;
    for (auto& [t, w] : v) w *= idf(t);
    return v;
  }

  // tf-idf cosine between `text` and one entity description, in [0, 1].
  double description_similarity(std::string_view text, std::string_view kb_id) const {
    const auto d = description_vector(kb_id);
    std::map<std::string, double> q;
    for (auto& t : text::terms(text)) q[t] += 1.0;
    double dot = 0, nq = 0, nd = 0;
    for (auto& [t, c] : q) {
      const double w = c * idf(t);
      nq += w * w;
      auto it = d.find(t);
      if (it != d.end()) dot += w * it->second;
    }
    for (const auto& [_, w] : d) nd += w * w;
    if (nq <= 0 || nd <= 0) return 0.0;
    return std::clamp(dot / std::sqrt(nq * nd), 0.0, 1.0);
  }

  // Human-readable dump of the derived tables; equal inputs give equal dumps.
  void write_index_tables(std::ostream& out) const {
    std::map<std::string, std::vector<std::string>> exact;
    for (const auto& [norm, n] : name_ids_) {
      auto& ids = exact[norm];
      for (std::uint32_t e : names_[n].entities) ids.push_back(entities_[e].kb_id);
      std::sort(ids.begin(), ids.end());
    }
    for (const auto& [norm, ids] : exact)
      out << "#exact\t" << text::escape_field(norm) << '\t' << text::join(ids, "|")
          << '\n';
    std::map<std::string, double> idfs;
    for (const auto& [t, p] : postings_) idfs[t] = p.idf;
    for (const auto& [t, w] : idfs) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", w);
      out << "#idf\t" << text::escape_field(t) << '\t' << buf << '\n';
    }
    for (const auto& e : entities_)
      out << "#hot\t" << e.kb_id << '\t' << hot_bin(e.links_count) << '\n';
  }

 private:
  struct Name {
    std::u32string chars;
    std::vector<std::uint32_t> entities;  // sorted, unique
  };
  struct Posting {
    double idf = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;  // entity, weight
  };

  void index_names() {
    for (std::uint32_t e = 0; e < entities_.size(); ++e) {
      const auto& ent = entities_[e];
      auto add = [&](const std::string& raw) {
        std::string norm = text::normalize(raw);
        if (norm.empty()) return;
        auto [it, inserted] =
            name_ids_.try_emplace(norm, static_cast<std::uint32_t>(names_.size()));
        if (inserted) names_.push_back({text::decode(norm), {}});
        auto& list = names_[it->second].entities;
        if (list.empty() || list.back() != e) list.push_back(e);
      };
      for (const auto& a : ent.aliases) add(a);
      for (const auto& r : ent.redirect_titles) add(r);
      for (const auto& d : ent.disambiguation_titles) add(d);
    }
    for (const auto& [norm, n] : name_ids_) {
      for (const auto& w : text::words(norm)) {
        auto& list = word_names_[w];
        if (list.empty() || list.back() != n) list.push_back(n);
      }
    }
    for (auto& [_, list] : word_names_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  void index_descriptions() {
    std::vector<std::map<std::string, double>> tfs(entities_.size());
    std::map<std::string, size_t> df;
    for (size_t e = 0; e < entities_.size(); ++e) {
      for (auto& t : text::terms(entities_[e].description)) tfs[e][t] += 1.0;
      for (const auto& [t, _] : tfs[e]) ++df[t];
    }
    const double n = static_cast<double>(entities_.size());
    for (const auto& [t, d] : df)
      postings_[t].idf = std::log(1.0 + n / static_cast<double>(d));
    desc_norm_.assign(entities_.size(), 0.0);
    for (std::uint32_t e = 0; e < entities_.size(); ++e) {
      double sq = 0;
      for (const auto& [t, c] : tfs[e]) {
        auto& p = postings_[t];
        const double w = c * p.idf;
        p.entries.emplace_back(e, w);
        sq += w * w;
      }
      desc_norm_[e] = std::sqrt(sq);
    }
  }

  std::vector<ScoredEntity> ranked(
      const std::unordered_map<std::uint32_t, double>& scores, size_t limit) const {
    std::vector<std::pair<std::uint32_t, double>> items(scores.begin(), scores.end());
    std::sort(items.begin(), items.end(), [&](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      const auto& ea = entities_[a.first];
      const auto& eb = entities_[b.first];
      if (ea.links_count != eb.links_count) return ea.links_count > eb.links_count;
      return ea.kb_id < eb.kb_id;
    });
    if (items.size() > limit) items.resize(limit);
    std::vector<ScoredEntity> out;
    out.reserve(items.size());
    for (const auto& [e, s] : items) out.push_back({entities_[e].kb_id, s});
    return out;
  }

  std::vector<KbEntity> entities_;
  AuxTables aux_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  std::vector<Name> names_;
  std::map<std::string, std::uint32_t> name_ids_;  // normalized name -> names_
  std::map<std::string, std::vector<std::uint32_t>> word_names_;
  std::unordered_map<std::string, Posting> postings_;
  std::vector<double> desc_norm_;
};

// ---------------------------------------------------------------------------
// Snapshot and aux-table files

namespace detail {

inline Error kb_malformed(const std::string& name, size_t line, const std::string& what) {
  return Error(ErrorCode::MalformedInput, name + ":" + std::to_string(line) + ": " + what);
}

inline std::vector<std::string> split_list(std::string_view field) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  for (auto& part : text::split(field, '|'))
    if (!part.empty()) out.push_back(text::unescape_field(part));
  return out;
}

// List items may not contain '|', which separates them.
inline std::string join_list(const std::vector<std::string>& items) {
  std::vector<std::string> esc;
  for (const auto& s : items) {
    if (s.find('|') != std::string::npos)
      throw Error(ErrorCode::MalformedInput, "list item contains '|': " + s);
    esc.push_back(text::escape_field(s));
  }
  return text::join(esc, "|");
}

template <typename Fn>
void for_each_record(std::istream& in, const std::string& name, size_t fields,
                     Fn&& fn) {
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = text::strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    auto parts = text::split(line, '\t');
    if (parts.size() != fields)
      throw kb_malformed(name, line_no,
                         "expected " + std::to_string(fields) + " tab-separated fields");
    fn(parts, line_no);
  }
}

inline std::ifstream open_kb_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return in;
}

}  // namespace detail

// Eight tab-separated fields: kb_id, canonical_name, aliases (|-separated),
// links_count, description, redirect_titles, disambiguation_titles,
// english_name (may be empty).
inline KbEntity parse_entity(const std::vector<std::string>& f,
                             const std::string& name, size_t line) {
  KbEntity e;
  e.kb_id = f[0];
  if (e.kb_id.empty()) throw detail::kb_malformed(name, line, "empty kb_id");
  e.canonical_name = text::unescape_field(f[1]);
  e.aliases = detail::split_list(f[2]);
  try {
    size_t used = 0;
    e.links_count = std::stoull(f[3], &used);
    if (used != f[3].size() || f[3][0] == '-') throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw detail::kb_malformed(name, line, "bad links_count '" + f[3] + "'");
  }
  e.description = text::unescape_field(f[4]);
  e.redirect_titles = detail::split_list(f[5]);
  e.disambiguation_titles = detail::split_list(f[6]);
  if (!f[7].empty()) e.english_name = text::unescape_field(f[7]);
  return e;
}

inline std::vector<KbEntity> read_entities(std::istream& in,
                                           const std::string& name = "kb") {
  std::vector<KbEntity> out;
  detail::for_each_record(in, name, 8, [&](const auto& f, size_t line) {
    out.push_back(parse_entity(f, name, line));
  });
  return out;
}

inline std::vector<KbEntity> load_entities(const std::string& path) {
  auto in = detail::open_kb_input(path);
  return read_entities(in, path);
}

inline void write_entity(std::ostream& out, const KbEntity& e) {
  out << e.kb_id << '\t' << text::escape_field(e.canonical_name) << '\t'
      << detail::join_list(e.aliases) << '\t' << e.links_count << '\t'
      << text::escape_field(e.description) << '\t'
      << detail::join_list(e.redirect_titles) << '\t'
      << detail::join_list(e.disambiguation_titles) << '\t'
      << (e.english_name ? text::escape_field(*e.english_name) : "") << '\n';
}

inline void write_entities(std::ostream& out, const std::vector<KbEntity>& es) {
  for (const auto& e : es) write_entity(out, e);
}

enum class AuxKind { Abbreviations, ZhVariants, Translations };

// Two-column TSV: abbreviation -> full name, simplified -> traditional, or
// source -> English.
inline void read_aux(std::istream& in, AuxKind kind, AuxTables& aux,
                     const std::string& name = "aux") {
  detail::for_each_record(in, name, 2, [&](const auto& f, size_t) {
    const std::string a = text::unescape_field(f[0]);
    const std::string b = text::unescape_field(f[1]);
    switch (kind) {
      case AuxKind::Abbreviations: aux.add_abbreviation(a, b); break;
      case AuxKind::ZhVariants: aux.add_zh_variant(a, b); break;
      case AuxKind::Translations: aux.add_translation(a, b); break;
    }
  });
}

inline void load_aux(const std::string& path, AuxKind kind, AuxTables& aux) {
  auto in = detail::open_kb_input(path);
  read_aux(in, kind, aux, path);
}

// Index artifact: the entity records and aux tables in one file, followed by
// the derived tables for inspection. Loading rebuilds the index from the
// records, which is deterministic.
inline void write_index(std::ostream& out, const KnowledgeBase& kb) {
  for (const auto& e : kb.entities()) {
    out << "E\t";
    write_entity(out, e);
  }
  for (const auto& [abbr, fulls] : kb.aux().abbreviations())
    for (const auto& full : fulls)
      out << "A\t" << text::escape_field(abbr) << '\t' << text::escape_field(full) << '\n';
  for (const auto& [a, b] : kb.aux().zh_variants())
    out << "Z\t" << text::escape_field(a) << '\t' << text::escape_field(b) << '\n';
  for (const auto& [a, b] : kb.aux().translations())
    out << "T\t" << text::escape_field(a) << '\t' << text::escape_field(b) << '\n';
  kb.write_index_tables(out);
}

inline KnowledgeBase read_index(std::istream& in, const std::string& name = "index") {
  std::vector<KbEntity> entities;
  AuxTables aux;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = text::strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    const std::string tag = f[0];
    f.erase(f.begin());
    if (tag == "E" && f.size() == 8) {
      entities.push_back(parse_entity(f, name, line_no));
    } else if ((tag == "A" || tag == "Z" || tag == "T") && f.size() == 2) {
      const std::string a = text::unescape_field(f[0]);
      const std::string b = text::unescape_field(f[1]);
      if (tag == "A") aux.add_abbreviation(a, b);
      else if (tag == "Z") aux.add_zh_variant(a, b);
      else aux.add_translation(a, b);
    } else {
      throw detail::kb_malformed(name, line_no, "unrecognized index record");
    }
  }
  return KnowledgeBase(std::move(entities), std::move(aux));
}

}  // namespace edl::kb

#endif  // EDL_KB_KNOWLEDGE_BASE_HPP_
