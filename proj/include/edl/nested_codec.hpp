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

#ifndef EDL_NESTED_CODEC_HPP_
#define EDL_NESTED_CODEC_HPP_

// Conversion between nested mention spans and the bracket/placeholder symbol
// sequences predicted by the encoder-decoder, plus flat BIO tags for the
// sequence-labeling tagger.

#include <algorithm>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "edl/common.hpp"
#include "edl/utf8.hpp"

namespace edl::codec {

// Token-level span [token_start, token_end).
struct Span {
  size_t token_start = 0;
  size_t token_end = 0;
  EntityType type = EntityType::PER;
  MentionKind kind = MentionKind::NAM;

  size_t length() const { return token_end - token_start; }
  bool operator==(const Span&) const = default;
};

// Canonical order: start ascending, longer spans first, then type and kind.
inline bool span_less(const Span& a, const Span& b) {
  if (a.token_start != b.token_start) return a.token_start < b.token_start;
  if (a.token_end != b.token_end) return a.token_end > b.token_end;
  return std::tie(a.type, a.kind) < std::tie(b.type, b.kind);
}

inline bool contains(const Span& outer, const Span& inner) {
  return outer.token_start <= inner.token_start &&
         inner.token_end <= outer.token_end;
}

inline bool crosses(const Span& a, const Span& b) {
  return (a.token_start < b.token_start && b.token_start < a.token_end &&
          a.token_end < b.token_end) ||
         (b.token_start < a.token_start && a.token_start < b.token_end &&
          b.token_end < a.token_end);
}

// A set of spans, kept in canonical order.
using NestedLabeling = std::vector<Span>;

inline NestedLabeling canonical(NestedLabeling spans) {
  std::sort(spans.begin(), spans.end(), span_less);
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  return spans;
}

inline void validate(size_t sentence_length, const NestedLabeling& spans) {
  for (const auto& s : spans) {
    if (s.token_start >= s.token_end || s.token_end > sentence_length)
      throw Error(ErrorCode::MalformedInput,
                  "span [" + std::to_string(s.token_start) + "," +
                      std::to_string(s.token_end) + ") out of bounds");
  }
  for (size_t i = 0; i < spans.size(); ++i)
    for (size_t j = i + 1; j < spans.size(); ++j)
      if (crosses(spans[i], spans[j]))
        throw Error(ErrorCode::CrossingSpans,
                    "spans [" + std::to_string(spans[i].token_start) + "," +
                        std::to_string(spans[i].token_end) + ") and [" +
                        std::to_string(spans[j].token_start) + "," +
                        std::to_string(spans[j].token_end) + ") cross");
}

// ---------------------------------------------------------------------------
// Symbols

inline constexpr int kNumLabels = kNumEntityTypes * kNumKinds;  // 10
inline constexpr int kSymbolCount = 2 * kNumLabels + 2;          // 22
inline constexpr int kPlaceholderId = 2 * kNumLabels;           // 20
inline constexpr int kEndId = 2 * kNumLabels + 1;                // 21

struct Symbol {
  enum class Kind { Open, Close, Placeholder, End };
  Kind kind = Kind::Placeholder;
  EntityType type = EntityType::PER;
  MentionKind mention_kind = MentionKind::NAM;

  static Symbol open(EntityType t, MentionKind k) { return {Kind::Open, t, k}; }
  static Symbol close(EntityType t, MentionKind k) { return {Kind::Close, t, k}; }
  static Symbol placeholder() { return {Kind::Placeholder, {}, {}}; }
  static Symbol end() { return {Kind::End, {}, {}}; }

  bool is_bracket() const { return kind == Kind::Open || kind == Kind::Close; }

  bool operator==(const Symbol& o) const {
    if (kind != o.kind) return false;
    if (!is_bracket()) return true;
    return type == o.type && mention_kind == o.mention_kind;
  }
};

inline int label_index(EntityType t, MentionKind k) {
  return static_cast<int>(t) * kNumKinds + static_cast<int>(k);
}

inline EntityType label_type(int label) {
  return static_cast<EntityType>(label / kNumKinds);
}

inline MentionKind label_kind(int label) {
  return static_cast<MentionKind>(label % kNumKinds);
}

inline int symbol_id(const Symbol& s) {
  switch (s.kind) {
    case Symbol::Kind::Open: return label_index(s.type, s.mention_kind);
    case Symbol::Kind::Close:
      return kNumLabels + label_index(s.type, s.mention_kind);
    case Symbol::Kind::Placeholder: return kPlaceholderId;
    case Symbol::Kind::End: return kEndId;
  }
  return kEndId;
}

inline Symbol symbol_from_id(int id) {
  if (id < kNumLabels) return Symbol::open(label_type(id), label_kind(id));
  if (id < 2 * kNumLabels)
    return Symbol::close(label_type(id - kNumLabels),
                         label_kind(id - kNumLabels));
  if (id == kPlaceholderId) return Symbol::placeholder();
  return Symbol::end();
}

inline std::string to_string(const Symbol& s) {
  switch (s.kind) {
    case Symbol::Kind::Placeholder: return "Z";
    case Symbol::Kind::End: return "</s>";
    default: break;
  }
  std::string out = s.kind == Symbol::Kind::Open ? "[_" : "]_";
  out += edl::to_string(s.type);
  if (s.mention_kind == MentionKind::NOM) out += ":NOM";
  return out;
}

inline std::string render(const std::vector<Symbol>& symbols) {
  std::vector<std::string> parts;
  parts.reserve(symbols.size());
  for (const auto& s : symbols) parts.push_back(to_string(s));
  return text::join(parts, " ");
}

inline std::vector<Symbol> parse_rendered(std::string_view line) {
  std::vector<Symbol> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    if (tok == "Z") {
      out.push_back(Symbol::placeholder());
    } else if (tok == "</s>") {
      out.push_back(Symbol::end());
    } else if (tok.size() > 2 && (tok[0] == '[' || tok[0] == ']') &&
               tok[1] == '_') {
      std::string body = tok.substr(2);
      MentionKind kind = MentionKind::NAM;
      if (body.size() > 4 && body.substr(body.size() - 4) == ":NOM") {
        kind = MentionKind::NOM;
        body.resize(body.size() - 4);
      }
      auto type = parse_entity_type(body);
      if (!type)
        throw Error(ErrorCode::UnknownEntityType, "symbol '" + tok + "'");
      out.push_back(tok[0] == '[' ? Symbol::open(*type, kind)
                                  : Symbol::close(*type, kind));
    } else {
      throw Error(ErrorCode::MalformedInput, "unknown symbol '" + tok + "'");
    }
  }
  return out;
}

// Emits exactly sentence_length placeholders, one bracket pair per span and a
// trailing End symbol.
inline std::vector<Symbol> linearize(size_t sentence_length,
                                     const NestedLabeling& labeling) {
  NestedLabeling spans = canonical(labeling);
  validate(sentence_length, spans);
  std::vector<Symbol> out;
  out.reserve(sentence_length + 2 * spans.size() + 1);
  std::vector<const Span*> stack;
  size_t next = 0;
  for (size_t pos = 0; pos < sentence_length; ++pos) {
    while (next < spans.size() && spans[next].token_start == pos) {
      out.push_back(Symbol::open(spans[next].type, spans[next].kind));
      stack.push_back(&spans[next]);
      ++next;
    }
    out.push_back(Symbol::placeholder());
    while (!stack.empty() && stack.back()->token_end == pos + 1) {
      out.push_back(Symbol::close(stack.back()->type, stack.back()->kind));
      stack.pop_back();
    }
  }
  out.push_back(Symbol::end());
  return out;
}

// Inverse of linearize. A trailing End is optional; anything after End is
// ignored. Bracket pairs enclosing no placeholder produce no span.
inline NestedLabeling parse_symbols(size_t sentence_length,
                                    const std::vector<Symbol>& symbols) {
  struct Open {
    EntityType type;
    MentionKind kind;
    size_t start;
  };
  std::vector<Open> stack;
  NestedLabeling spans;
  size_t pos = 0;
  for (const auto& s : symbols) {
    if (s.kind == Symbol::Kind::End) break;
    switch (s.kind) {
      case Symbol::Kind::Placeholder:
        ++pos;
        break;
      case Symbol::Kind::Open:
        stack.push_back({s.type, s.mention_kind, pos});
        break;
      case Symbol::Kind::Close: {
        if (stack.empty() || stack.back().type != s.type ||
            stack.back().kind != s.mention_kind)
          throw Error(ErrorCode::UnmatchedBracket,
                      "unexpected " + to_string(s));
        Open o = stack.back();
        stack.pop_back();
        if (pos > o.start) spans.push_back({o.start, pos, o.type, o.kind});
        break;
      }
      default:
        break;
    }
  }
  if (!stack.empty())
    throw Error(ErrorCode::UnmatchedBracket,
                "unclosed " + to_string(Symbol::open(stack.back().type,
                                                     stack.back().kind)));
  if (pos != sentence_length)
    throw Error(ErrorCode::PlaceholderCountMismatch,
                "expected " + std::to_string(sentence_length) +
                    " placeholders, found " + std::to_string(pos));
  return canonical(std::move(spans));
}

// Marks the symbols that survive repair, which drops unmatched brackets.
// A Close is kept when an Open of the same label is
// on the stack; Opens above that match are dropped. Opens still pending at
// the end are dropped. Placeholders and End are never dropped.
inline std::vector<bool> repair_mask(const std::vector<Symbol>& symbols) {
  std::vector<bool> keep(symbols.size(), true);
  std::vector<size_t> stack;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const Symbol& s = symbols[i];
    if (s.kind == Symbol::Kind::Open) {
      stack.push_back(i);
    } else if (s.kind == Symbol::Kind::Close) {
      size_t depth = stack.size();
      while (depth > 0) {
        const Symbol& o = symbols[stack[depth - 1]];
        if (o.type == s.type && o.mention_kind == s.mention_kind) break;
        --depth;
      }
      if (depth == 0) {
        keep[i] = false;
        continue;
      }
      while (stack.size() > depth) {
        keep[stack.back()] = false;
        stack.pop_back();
      }
      stack.pop_back();
    }
  }
  for (size_t i : stack) keep[i] = false;
  return keep;
}

inline std::vector<Symbol> repair(const std::vector<Symbol>& symbols) {
  const std::vector<bool> keep = repair_mask(symbols);
  std::vector<Symbol> out;
  out.reserve(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i)
    if (keep[i]) out.push_back(symbols[i]);
  return out;
}

inline size_t placeholder_count(const std::vector<Symbol>& symbols) {
  return static_cast<size_t>(std::count_if(
      symbols.begin(), symbols.end(),
      [](const Symbol& s) { return s.kind == Symbol::Kind::Placeholder; }));
}

// ---------------------------------------------------------------------------
// Flat BIO tags: 0 = O, then B/I pairs per (type, kind) label.

inline constexpr int kTagCount = 1 + 2 * kNumLabels;  // 21
inline constexpr int kOutsideTag = 0;

inline int begin_tag(int label) { return 1 + 2 * label; }
inline int inside_tag(int label) { return 2 + 2 * label; }
inline bool is_begin(int tag) { return tag > 0 && tag % 2 == 1; }
inline bool is_inside(int tag) { return tag > 0 && tag % 2 == 0; }
inline int tag_label(int tag) { return (tag - 1) / 2; }

using FlatTagSequence = std::vector<int>;

inline std::string tag_name(int tag) {
  if (tag == kOutsideTag) return "O";
  int label = tag_label(tag);
  return std::string(is_begin(tag) ? "B-" : "I-") +
         edl::to_string(label_type(label)) + "-" +
         edl::to_string(label_kind(label));
}

// I-x is legal only after B-x or I-x of the same label.
inline bool transition_allowed(int prev_tag, int tag) {
  if (!is_inside(tag)) return true;
  return prev_tag > 0 && tag_label(prev_tag) == tag_label(tag);
}

inline bool bio_consistent(const FlatTagSequence& tags) {
  int prev = kOutsideTag;
  for (int t : tags) {
    if (t < 0 || t >= kTagCount || !transition_allowed(prev, t)) return false;
    prev = t;
  }
  return true;
}

// Spans not contained in any other span. Of identical spans the first in
// canonical order wins.
inline NestedLabeling outermost(const NestedLabeling& labeling) {
  NestedLabeling spans = canonical(labeling);
  NestedLabeling out;
  for (const auto& s : spans) {
    if (!out.empty() && contains(out.back(), s)) continue;
    out.push_back(s);
  }
  return out;
}

inline FlatTagSequence flatten_to_bio(size_t sentence_length,
                                      const NestedLabeling& labeling) {
  validate(sentence_length, labeling);
  FlatTagSequence tags(sentence_length, kOutsideTag);
  for (const auto& s : outermost(labeling)) {
    int label = label_index(s.type, s.kind);
    tags[s.token_start] = begin_tag(label);
    for (size_t i = s.token_start + 1; i < s.token_end; ++i)
      tags[i] = inside_tag(label);
  }
  return tags;
}

// An I tag that does not continue a span of its label starts a new one.
inline NestedLabeling bio_to_spans(const FlatTagSequence& tags) {
  NestedLabeling out;
  int current = -1;
  size_t start = 0;
  auto flush = [&](size_t end) {
    if (current >= 0)
      out.push_back({start, end, label_type(current), label_kind(current)});
    current = -1;
  };
  for (size_t i = 0; i < tags.size(); ++i) {
    int t = tags[i];
    if (t == kOutsideTag) {
      flush(i);
    } else if (is_inside(t) && current == tag_label(t)) {
      continue;
    } else {
      flush(i);
      current = tag_label(t);
      start = i;
    }
  }
  flush(tags.size());
  return canonical(std::move(out));
}

}  // namespace edl::codec

#endif  // EDL_NESTED_CODEC_HPP_
