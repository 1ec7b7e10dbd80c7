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

#ifndef EDL_CORPUS_HPP_
#define EDL_CORPUS_HPP_

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "edl/common.hpp"
#include "edl/utf8.hpp"

namespace edl {

struct Document {
  std::string doc_id;
  std::string text;
  Category category = Category::NewsReport;
  Language language = Language::ENG;
};

// Character offsets are scalar-value counts, [char_start, char_end).
struct Token {
  std::string surface;
  size_t char_start = 0;
  size_t char_end = 0;

  bool operator==(const Token&) const = default;
};

struct Mention {
  std::string doc_id;
  size_t char_start = 0;
  size_t char_end = 0;
  std::string surface;
  EntityType entity_type = EntityType::PER;
  MentionKind kind = MentionKind::NAM;
  double confidence = 1.0;

  size_t length() const { return char_end - char_start; }
  bool operator==(const Mention&) const = default;
};

// Ordering used everywhere output must be deterministic.
inline bool mention_less(const Mention& a, const Mention& b) {
  return std::tie(a.doc_id, a.char_start, a.char_end, a.entity_type, a.kind,
                  a.surface) < std::tie(b.doc_id, b.char_start, b.char_end,
                                        b.entity_type, b.kind, b.surface);
}

// Exact-match key: document, span, type and kind.
inline auto mention_key(const Mention& m) {
  return std::make_tuple(m.doc_id, m.char_start, m.char_end, m.entity_type,
                         m.kind);
}

struct LinkTarget {
  enum class Kind { Kb, Nil };
  Kind kind = Kind::Nil;
  std::string id;  // kb id, or NIL cluster label (may be empty before clustering)

  static LinkTarget kb(std::string id) { return {Kind::Kb, std::move(id)}; }
  static LinkTarget nil(std::string label = {}) {
    return {Kind::Nil, std::move(label)};
  }
  bool is_nil() const { return kind == Kind::Nil; }
  bool operator==(const LinkTarget&) const = default;
};

// Link ids beginning with "NIL" are cluster labels, everything else a kb id.
inline LinkTarget parse_link(std::string_view s) {
  if (s.substr(0, 3) == "NIL") return LinkTarget::nil(std::string(s));
  return LinkTarget::kb(std::string(s));
}

// One record of the gold/submission TSV.
struct LinkedMention {
  Mention mention;
  LinkTarget target;
  std::string system_id;
  std::string mention_uid;

  bool operator==(const LinkedMention&) const = default;
};

using GoldLink = LinkedMention;

// ENG/SPA: maximal letter/digit runs are tokens, every other non-space
// character is its own token. CMN: one token per non-space character.
inline std::vector<Token> tokenize(std::u32string_view chars, Language lang,
                                   size_t offset = 0) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = chars.size();
  while (i < n) {
    char32_t c = chars[i];
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    if (lang != Language::CMN && text::is_word_char(c) && !text::is_cjk(c)) {
      while (j < n && text::is_word_char(chars[j]) && !text::is_cjk(chars[j]))
        ++j;
    }
    out.push_back(Token{text::encode(chars.substr(i, j - i)), offset + i,
                        offset + j});
    i = j;
  }
  return out;
}

inline std::vector<Token> tokenize(std::string_view text, Language lang) {
  return tokenize(text::decode(text), lang);
}

// Sentences are newline-delimited; token offsets stay document-relative.
inline std::vector<std::vector<Token>> sentences(const Document& doc) {
  std::vector<std::vector<Token>> out;
  std::u32string chars = text::decode(doc.text);
  size_t start = 0;
  while (start <= chars.size()) {
    size_t end = chars.find(U'\n', start);
    if (end == std::u32string::npos) end = chars.size();
    auto toks = tokenize(
        std::u32string_view(chars).substr(start, end - start), doc.language,
        start);
    if (!toks.empty()) out.push_back(std::move(toks));
    start = end + 1;
  }
  return out;
}

inline std::string substring(std::u32string_view chars, size_t start,
                             size_t end) {
  if (start > end || end > chars.size()) return {};
  return text::encode(chars.substr(start, end - start));
}

inline std::string substring(const Document& doc, size_t start, size_t end) {
  return substring(text::decode(doc.text), start, end);
}

namespace detail {

inline Error malformed(const std::string& where, size_t line,
                       const std::string& what) {
  return Error(ErrorCode::MalformedInput,
               where + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return in;
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// doc_id <TAB> category <TAB> language <TAB> escaped text
inline std::vector<Document> read_documents(std::istream& in,
                                            const std::string& name = "input") {
  std::vector<Document> docs;
  std::set<std::string> seen;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = text::strip_cr(raw);
    if (line.empty()) continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 4)
      throw detail::malformed(name, line_no, "expected 4 tab-separated fields");
    auto category = parse_category(fields[1]);
    if (!category)
      throw detail::malformed(name, line_no, "bad category '" + fields[1] + "'");
    auto language = parse_language(fields[2]);
    if (!language)
      throw detail::malformed(name, line_no, "bad language '" + fields[2] + "'");
    if (fields[0].empty())
      throw detail::malformed(name, line_no, "empty doc_id");
    if (!seen.insert(fields[0]).second)
      throw Error(ErrorCode::DuplicateDocId,
                  name + ":" + std::to_string(line_no) + ": " + fields[0]);
    docs.push_back(Document{fields[0], text::unescape_field(fields[3]),
                            *category, *language});
  }
  return docs;
}

inline std::vector<Document> load_documents(const std::string& path) {
  auto in = detail::open_input(path);
  return read_documents(in, path);
}

inline void write_documents(std::ostream& out,
                            const std::vector<Document>& docs) {
  for (const auto& d : docs) {
    out << d.doc_id << '\t' << to_string(d.category) << '\t'
        << to_string(d.language) << '\t' << text::escape_field(d.text) << '\n';
  }
}

inline LinkedMention parse_linked_mention(std::string_view line,
                                          const std::string& name,
                                          size_t line_no) {
  auto f = text::split(line, '\t');
  if (f.size() != 8)
    throw detail::malformed(name, line_no, "expected 8 tab-separated fields");
  LinkedMention r;
  r.system_id = f[0];
  r.mention_uid = f[1];
  r.mention.surface = text::unescape_field(f[2]);
  const std::string& loc = f[3];
  size_t colon = loc.rfind(':');
  if (colon == std::string::npos || colon == 0)
    throw detail::malformed(name, line_no, "bad span '" + loc + "'");
  size_t dash = loc.find('-', colon);
  if (dash == std::string::npos)
    throw detail::malformed(name, line_no, "bad span '" + loc + "'");
  r.mention.doc_id = loc.substr(0, colon);
  std::string_view loc_view(loc);
  if (!detail::parse_number(loc_view.substr(colon + 1, dash - colon - 1),
                            r.mention.char_start) ||
      !detail::parse_number(loc_view.substr(dash + 1), r.mention.char_end) ||
      r.mention.char_start >= r.mention.char_end)
    throw detail::malformed(name, line_no, "bad span '" + loc + "'");
  if (f[4].empty()) throw detail::malformed(name, line_no, "empty link");
  r.target = parse_link(f[4]);
  auto type = parse_entity_type(f[5]);
  if (!type)
    throw Error(ErrorCode::UnknownEntityType,
                name + ":" + std::to_string(line_no) + ": '" + f[5] + "'");
  r.mention.entity_type = *type;
  auto kind = parse_kind(f[6]);
  if (!kind) throw detail::malformed(name, line_no, "bad kind '" + f[6] + "'");
  r.mention.kind = *kind;
  double conf = 0;
  if (!detail::parse_number(std::string_view(f[7]), conf) || conf < 0 ||
      conf > 1)
    throw detail::malformed(name, line_no, "bad confidence '" + f[7] + "'");
  r.mention.confidence = conf;
  return r;
}

inline std::vector<GoldLink> read_gold(std::istream& in,
                                       const std::string& name = "input") {
  std::vector<GoldLink> out;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = text::strip_cr(raw);
    if (line.empty()) continue;
    out.push_back(parse_linked_mention(line, name, line_no));
  }
  return out;
}

inline std::vector<GoldLink> load_gold(const std::string& path) {
  auto in = detail::open_input(path);
  return read_gold(in, path);
}

inline bool linked_less(const LinkedMention& a, const LinkedMention& b) {
  if (mention_less(a.mention, b.mention)) return true;
  if (mention_less(b.mention, a.mention)) return false;
  return std::tie(a.target.id, a.mention_uid) <
         std::tie(b.target.id, b.mention_uid);
}

// Writes records sorted by (doc_id, char_start, char_end). Records without a
// uid get "<system_id>_<ordinal>".
inline void write_submission(std::ostream& out,
                             std::vector<LinkedMention> records,
                             const std::string& default_system = "EDL") {
  std::sort(records.begin(), records.end(), linked_less);
  size_t ordinal = 0;
  for (const auto& r : records) {
    ++ordinal;
    const std::string system = r.system_id.empty() ? default_system : r.system_id;
    std::string uid = r.mention_uid;
    if (uid.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%06zu", ordinal);
      uid = system + "_" + buf;
    }
    out << system << '\t' << uid << '\t'
        << text::escape_field(r.mention.surface) << '\t' << r.mention.doc_id
        << ':' << r.mention.char_start << '-' << r.mention.char_end << '\t'
        << (r.target.id.empty() ? std::string("NIL") : r.target.id) << '\t'
        << to_string(r.mention.entity_type) << '\t'
        << to_string(r.mention.kind) << '\t'
        << detail::format_double(r.mention.confidence) << '\n';
  }
}

inline void write_submission(const std::string& path,
                             std::vector<LinkedMention> records,
                             const std::string& default_system = "EDL") {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_submission(out, std::move(records), default_system);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace edl

#endif  // EDL_CORPUS_HPP_
