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

#ifndef EDL_MD_DETECTOR_HPP_
#define EDL_MD_DETECTOR_HPP_

// Mention detection on documents: model bundles, single-model and ensemble
// decoding, conversion between token spans and character mentions, and the
// fusion of the two systems' outputs.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "edl/corpus.hpp"
#include "edl/md/beam.hpp"
#include "edl/md/train.hpp"
#include "edl/neural/tensor.hpp"

namespace edl::md {

// A trained (or freshly initialized) tagger with its vocabulary.
struct TaggerModel {
  ModelKind kind = ModelKind::CRNNLM;
  TaggerConfig config;
  Vocab vocab;
  ParameterStore params;

  std::vector<int> ids(const std::vector<Token>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(vocab.id(t.surface));
    return out;
  }

  nn::Checkpoint to_checkpoint(std::uint64_t config_hash) const {
    nn::Checkpoint ck;
    ck.config_hash = config_hash;
    ck.seed = config.seed;
    ck.meta["kind"] = to_string(kind);
    ck.meta["vocab"] = vocab.serialize();
    for (const auto& [k, v] : config.to_map()) ck.meta["config." + k] = v;
    ck.params = params;
    return ck;
  }

  static TaggerModel from_checkpoint(const nn::Checkpoint& ck) {
    TaggerModel m;
    auto kind = ck.meta.find("kind");
    if (kind == ck.meta.end())
      throw Error(ErrorCode::MalformedInput, "checkpoint lacks model kind");
    m.kind = parse_model_kind(kind->second);
    std::map<std::string, std::string> cfg;
    for (const auto& [k, v] : ck.meta)
      if (k.rfind("config.", 0) == 0) cfg[k.substr(7)] = v;
    m.config.apply(cfg);
    auto vocab = ck.meta.find("vocab");
    m.vocab = Vocab::deserialize(vocab == ck.meta.end() ? "" : vocab->second);
    m.params = ck.params;
    return m;
  }
};

inline Vocab build_vocab(const std::vector<std::vector<Token>>& sentences) {
  Vocab v;
  for (const auto& s : sentences)
    for (const auto& t : s) v.add(t.surface);
  return v;
}

// Decoded token-level span with a confidence in (0, 1].
struct ScoredSpan {
  codec::Span span;
  double confidence = 1.0;
};

// Flat spans; confidence is the geometric mean of the span's tag
// probabilities.
inline std::vector<ScoredSpan> flat_spans(const BeamResult& r) {
  std::vector<ScoredSpan> out;
  for (const auto& s : codec::bio_to_spans(r.symbols)) {
    double sum = 0;
    for (size_t i = s.token_start; i < s.token_end; ++i) sum += r.step_log_probs[i];
    out.push_back({s, std::exp(sum / static_cast<double>(s.length()))});
  }
  return out;
}

// Repairs the decoded symbols and extracts spans; confidence is the geometric
// mean of the open and close bracket probabilities.
inline std::vector<ScoredSpan> bracket_spans(const BeamResult& r,
                                             size_t sentence_length) {
  std::vector<codec::Symbol> symbols;
  for (int id : r.symbols) symbols.push_back(codec::symbol_from_id(id));
  const std::vector<bool> keep = codec::repair_mask(symbols);
  std::vector<codec::Symbol> repaired;
  std::vector<double> lps;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (!keep[i]) continue;
    repaired.push_back(symbols[i]);
    lps.push_back(r.step_log_probs[i]);
  }
  std::vector<ScoredSpan> out;
  if (codec::placeholder_count(repaired) != sentence_length) return out;
  struct Open {
    codec::Symbol sym;
    size_t start;
    double lp;
  };
  std::vector<Open> stack;
  size_t pos = 0;
  for (size_t i = 0; i < repaired.size(); ++i) {
    const auto& s = repaired[i];
    using K = codec::Symbol::Kind;
    if (s.kind == K::Placeholder) {
      ++pos;
    } else if (s.kind == K::Open) {
      stack.push_back({s, pos, lps[i]});
    } else if (s.kind == K::Close && !stack.empty()) {
      Open o = stack.back();
      stack.pop_back();
      if (pos > o.start)
        out.push_back({{o.start, pos, o.sym.type, o.sym.mention_kind},
                       std::exp(0.5 * (o.lp + lps[i]))});
    } else if (s.kind == K::End) {
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](const ScoredSpan& a, const ScoredSpan& b) {
    return codec::span_less(a.span, b.span);
  });
  return out;
}

struct DecodeOptions {
  size_t beam_width = 10;
  bool mask_nominal = false;
};

// Decodes one tokenized sentence with an ensemble of same-kind models
// (a single model is an ensemble of one).
inline std::vector<ScoredSpan> ensemble_decode(
    const std::vector<const TaggerModel*>& models,
    const std::vector<Token>& tokens, const DecodeOptions& opts) {
  if (models.empty()) throw Error(ErrorCode::AlphabetMismatch, "no models");
  if (tokens.empty()) return {};
  const ModelKind kind = models[0]->kind;
  for (const auto* m : models) {
    if (m->kind != kind || !m->config.same_shape(models[0]->config) ||
        !m->params.same_layout(models[0]->params))
      throw Error(ErrorCode::AlphabetMismatch,
                  "ensemble members differ in kind or shape");
  }
  if (kind == ModelKind::CRNNLM) {
    std::vector<CrnnlmScorer> members;
    for (const auto* m : models)
      members.emplace_back(m->params, encode(m->params, m->ids(tokens)));
    FlatMask mask = opts.mask_nominal ? FlatMask::without_nominal() : FlatMask{};
    BeamResult r =
        members.size() == 1
            ? beam_decode_flat(members[0], opts.beam_width, mask)
            : beam_decode_flat(EnsembleScorer<CrnnlmScorer>(std::move(members)),
                               opts.beam_width, mask);
    return flat_spans(r);
  }
  std::vector<Seq2seqScorer> members;
  for (const auto* m : models)
    members.emplace_back(m->params, encode(m->params, m->ids(tokens)));
  SymbolMask mask =
      opts.mask_nominal ? SymbolMask::without_nominal() : SymbolMask{};
  BeamResult r =
      members.size() == 1
          ? beam_decode_seq2seq(members[0], opts.beam_width, tokens.size(), mask)
          : beam_decode_seq2seq(EnsembleScorer<Seq2seqScorer>(std::move(members)),
                                opts.beam_width, tokens.size(), mask);
  return bracket_spans(r, tokens.size());
}

inline Mention span_to_mention(const Document& doc, std::u32string_view chars,
                               const std::vector<Token>& tokens,
                               const ScoredSpan& s) {
  Mention m;
  m.doc_id = doc.doc_id;
  m.char_start = tokens[s.span.token_start].char_start;
  m.char_end = tokens[s.span.token_end - 1].char_end;
  m.surface = substring(chars, m.char_start, m.char_end);
  m.entity_type = s.span.type;
  m.kind = s.span.kind;
  m.confidence = std::clamp(s.confidence, 0.0, 1.0);
  return m;
}

// Runs an ensemble over every sentence of a document.
inline std::vector<Mention> detect_mentions(
    const std::vector<const TaggerModel*>& models, const Document& doc,
    DecodeOptions opts) {
  std::vector<Mention> out;
  std::u32string chars = text::decode(doc.text);
  for (const auto& tokens : sentences(doc)) {
    for (const auto& s : ensemble_decode(models, tokens, opts))
      out.push_back(span_to_mention(doc, chars, tokens, s));
  }
  std::sort(out.begin(), out.end(), mention_less);
  return out;
}

// Token-aligned gold spans for one sentence. Mentions whose boundaries do not
// fall on token boundaries are skipped, as are crossing mentions (the later
// one in canonical order is dropped).
inline codec::NestedLabeling align_mentions(const std::vector<Token>& tokens,
                                            const std::vector<Mention>& mentions) {
  codec::NestedLabeling spans;
  if (tokens.empty()) return spans;
  for (const auto& m : mentions) {
    size_t start = tokens.size(), end = tokens.size();
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].char_start == m.char_start) start = i;
      if (tokens[i].char_end == m.char_end) end = i + 1;
    }
    if (start >= tokens.size() || end > tokens.size() || start >= end) continue;
    spans.push_back({start, end, m.entity_type, m.kind});
  }
  spans = codec::canonical(std::move(spans));
  codec::NestedLabeling kept;
  for (const auto& s : spans) {
    bool ok = true;
    for (const auto& k : kept)
      if (codec::crosses(k, s)) ok = false;
    if (ok) kept.push_back(s);
  }
  return kept;
}

struct TokenizedSentence {
  std::vector<Token> tokens;
  codec::NestedLabeling spans;
};

inline std::vector<TokenizedSentence> annotated_sentences(
    const std::vector<Document>& docs, const std::vector<Mention>& gold) {
  std::map<std::string, std::vector<Mention>> by_doc;
  for (const auto& m : gold) by_doc[m.doc_id].push_back(m);
  std::vector<TokenizedSentence> out;
  for (const auto& doc : docs) {
    const auto& mentions = by_doc[doc.doc_id];
    for (auto& tokens : sentences(doc)) {
      std::vector<Mention> inside;
      for (const auto& m : mentions)
        if (m.char_start >= tokens.front().char_start &&
            m.char_end <= tokens.back().char_end)
          inside.push_back(m);
      auto spans = align_mentions(tokens, inside);
      out.push_back({std::move(tokens), std::move(spans)});
    }
  }
  return out;
}

// System fusion: union of both outputs. Exact duplicates (span, type, kind)
// keep the higher confidence. Of two crossing mentions the higher-confidence
// one survives, ties going to the longer span and then to system A.
inline std::vector<Mention> merge_systems(const std::vector<Mention>& a,
                                          const std::vector<Mention>& b) {
  struct Entry {
    Mention m;
    int system;
  };
  std::map<decltype(mention_key(std::declval<Mention>())), Entry> unique;
  auto add = [&](const Mention& m, int system) {
    auto [it, inserted] = unique.try_emplace(mention_key(m), Entry{m, system});
    if (!inserted && m.confidence > it->second.m.confidence)
      it->second = Entry{m, system};
  };
  for (const auto& m : a) add(m, 0);
  for (const auto& m : b) add(m, 1);

  std::vector<Entry> entries;
  for (auto& [_, e] : unique) entries.push_back(e);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& x, const Entry& y) {
                     if (x.m.confidence != y.m.confidence)
                       return x.m.confidence > y.m.confidence;
                     if (x.m.length() != y.m.length())
                       return x.m.length() > y.m.length();
                     if (x.system != y.system) return x.system < y.system;
                     return mention_less(x.m, y.m);
                   });
  auto cross = [](const Mention& x, const Mention& y) {
    if (x.doc_id != y.doc_id) return false;
    return (x.char_start < y.char_start && y.char_start < x.char_end &&
            x.char_end < y.char_end) ||
           (y.char_start < x.char_start && x.char_start < y.char_end &&
            y.char_end < x.char_end);
  };
  std::vector<Mention> kept;
  for (const auto& e : entries) {
    bool ok = true;
    for (const auto& k : kept)
      if (cross(k, e.m)) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(e.m);
  }
  std::sort(kept.begin(), kept.end(), mention_less);
  return kept;
}

}  // namespace edl::md

#endif  // EDL_MD_DETECTOR_HPP_
