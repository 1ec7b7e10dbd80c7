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

#ifndef EDL_MD_BEAM_HPP_
#define EDL_MD_BEAM_HPP_

// Beam search over step scorers. A scorer provides
//
//   using State = ...;
//   State initial() const;
//   int alphabet_size() const;
//   int start_symbol() const;
//   size_t length() const;
//   Vec step(const State&, int prev, size_t pos, State& next) const;
//
// where step returns log-probabilities of the next symbol. Hypotheses are
// ranked by summed log-probability; at most `beam_width` survive each step.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "edl/md/models.hpp"
#include "edl/nested_codec.hpp"

namespace edl::md {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BeamResult {
  std::vector<int> symbols;
  std::vector<double> step_log_probs;
  double score = kNegInf;
};

namespace detail {

template <typename State>
struct Hypothesis {
  State state;
  int last = 0;
  double score = 0;
  size_t placeholders = 0;
  std::vector<int> symbols;
  std::vector<double> log_probs;
};

struct Expansion {
  size_t parent;
  int symbol;
  double score;
};

// Highest score first; ties go to the earlier parent, then lower symbol id.
inline void select_top(std::vector<Expansion>& cands, size_t width) {
  auto better = [](const Expansion& a, const Expansion& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.parent != b.parent) return a.parent < b.parent;
    return a.symbol < b.symbol;
  };
  if (cands.size() > width) {
    std::partial_sort(cands.begin(), cands.begin() + static_cast<long>(width),
                      cands.end(), better);
    cands.resize(width);
  } else {
    std::sort(cands.begin(), cands.end(), better);
  }
}

}  // namespace detail

// Tag mask for flat decoding; allowed[tag] == false removes a tag entirely.
struct FlatMask {
  std::vector<bool> allowed = std::vector<bool>(codec::kTagCount, true);

  bool permits(int prev, int tag) const {
    if (!allowed[static_cast<size_t>(tag)]) return false;
    return codec::transition_allowed(prev == kTagBos ? codec::kOutsideTag : prev,
                                     tag);
  }

  static FlatMask without_nominal() {
    FlatMask m;
    for (int t = 1; t < codec::kTagCount; ++t)
      if (codec::label_kind(codec::tag_label(t)) == MentionKind::NOM)
        m.allowed[static_cast<size_t>(t)] = false;
    return m;
  }
};

// Fixed-length decoding of a BIO tag sequence. Illegal transitions (I-x after
// anything other than B-x/I-x) score -inf.
template <typename Scorer>
BeamResult beam_decode_flat(const Scorer& scorer, size_t beam_width,
                            const FlatMask& mask = {}) {
  using Hyp = detail::Hypothesis<typename Scorer::State>;
  beam_width = std::max<size_t>(beam_width, 1);
  const size_t n = scorer.length();
  std::vector<Hyp> beam(1);
  beam[0].state = scorer.initial();
  beam[0].last = scorer.start_symbol();
  for (size_t pos = 0; pos < n; ++pos) {
    std::vector<typename Scorer::State> next_states(beam.size());
    std::vector<Vec> log_probs(beam.size());
    std::vector<detail::Expansion> cands;
    for (size_t b = 0; b < beam.size(); ++b) {
      log_probs[b] = scorer.step(beam[b].state, beam[b].last, pos, next_states[b]);
      for (int tag = 0; tag < scorer.alphabet_size(); ++tag) {
        if (!mask.permits(beam[b].last, tag)) continue;
        double lp = log_probs[b][static_cast<size_t>(tag)];
        if (lp == kNegInf) continue;
        cands.push_back({b, tag, beam[b].score + lp});
      }
    }
    detail::select_top(cands, beam_width);
    std::vector<Hyp> next;
    next.reserve(cands.size());
    for (const auto& c : cands) {
      const Hyp& parent = beam[c.parent];
      Hyp h;
      h.state = next_states[c.parent];
      h.last = c.symbol;
      h.score = c.score;
      h.symbols = parent.symbols;
      h.symbols.push_back(c.symbol);
      h.log_probs = parent.log_probs;
      h.log_probs.push_back(log_probs[c.parent][static_cast<size_t>(c.symbol)]);
      next.push_back(std::move(h));
    }
    beam = std::move(next);
    if (beam.empty()) return {};
  }
  BeamResult best;
  best.symbols = beam[0].symbols;
  best.step_log_probs = beam[0].log_probs;
  best.score = beam[0].score;
  return best;
}

// Symbol mask for bracket decoding. Placeholder and End are always allowed.
struct SymbolMask {
  std::vector<bool> allowed = std::vector<bool>(codec::kSymbolCount, true);

  static SymbolMask without_nominal() {
    SymbolMask m;
    for (int id = 0; id < 2 * codec::kNumLabels; ++id) {
      if (codec::label_kind(id % codec::kNumLabels) == MentionKind::NOM)
        m.allowed[static_cast<size_t>(id)] = false;
    }
    return m;
  }

  static SymbolMask only(const std::vector<int>& ids) {
    SymbolMask m;
    m.allowed.assign(codec::kSymbolCount, false);
    for (int id : ids) m.allowed[static_cast<size_t>(id)] = true;
    return m;
  }
};

inline size_t max_output_length(size_t sentence_length) {
  return 3 * sentence_length + 1;
}

// Whether `symbol` may follow a prefix of `emitted` symbols containing
// `placeholders` placeholders. Placeholder is forbidden once all are
// emitted, End only allowed once they are, and brackets only when enough
// budget remains to finish within the 3T+1 cap.
inline bool seq2seq_permits(int symbol, size_t emitted, size_t placeholders,
                            size_t sentence_length, const SymbolMask& mask) {
  const size_t cap = max_output_length(sentence_length);
  if (emitted >= cap) return false;
  const size_t remaining_after = cap - emitted - 1;
  if (symbol == codec::kPlaceholderId) return placeholders < sentence_length;
  if (symbol == codec::kEndId) return placeholders == sentence_length;
  if (!mask.allowed[static_cast<size_t>(symbol)]) return false;
  return remaining_after >= (sentence_length - placeholders) + 1;
}

template <typename Scorer>
BeamResult beam_decode_seq2seq(const Scorer& scorer, size_t beam_width,
                               size_t sentence_length,
                               const SymbolMask& mask = {}) {
  using Hyp = detail::Hypothesis<typename Scorer::State>;
  beam_width = std::max<size_t>(beam_width, 1);
  const size_t cap = max_output_length(sentence_length);
  std::vector<Hyp> beam(1);
  beam[0].state = scorer.initial();
  beam[0].last = scorer.start_symbol();
  BeamResult best;
  for (size_t t = 0; t < cap && !beam.empty(); ++t) {
    std::vector<typename Scorer::State> next_states(beam.size());
    std::vector<Vec> log_probs(beam.size());
    std::vector<detail::Expansion> cands;
    for (size_t b = 0; b < beam.size(); ++b) {
      log_probs[b] = scorer.step(beam[b].state, beam[b].last, t, next_states[b]);
      for (int sym = 0; sym < scorer.alphabet_size(); ++sym) {
        if (!seq2seq_permits(sym, t, beam[b].placeholders, sentence_length,
                             mask))
          continue;
        double lp = log_probs[b][static_cast<size_t>(sym)];
        if (lp == kNegInf) continue;
        cands.push_back({b, sym, beam[b].score + lp});
      }
    }
    detail::select_top(cands, beam_width);
    std::vector<Hyp> next;
    for (const auto& c : cands) {
      const Hyp& parent = beam[c.parent];
      const double lp = log_probs[c.parent][static_cast<size_t>(c.symbol)];
      if (c.symbol == codec::kEndId) {
        if (c.score > best.score) {
          best.symbols = parent.symbols;
          best.symbols.push_back(c.symbol);
          best.step_log_probs = parent.log_probs;
          best.step_log_probs.push_back(lp);
          best.score = c.score;
        }
        continue;
      }
      Hyp h;
      h.state = next_states[c.parent];
      h.last = c.symbol;
      h.score = c.score;
      h.placeholders =
          parent.placeholders + (c.symbol == codec::kPlaceholderId ? 1 : 0);
      h.symbols = parent.symbols;
      h.symbols.push_back(c.symbol);
      h.log_probs = parent.log_probs;
      h.log_probs.push_back(lp);
      next.push_back(std::move(h));
    }
    // Scores only decrease, so no live hypothesis can beat a finished one
    // that already outscores the whole beam.
    if (!next.empty() && best.score >= next.front().score) break;
    beam = std::move(next);
  }
  return best;
}

// Averages the members' per-step log-probabilities and renormalizes in log
// space.
template <typename Scorer>
class EnsembleScorer {
 public:
  using State = std::vector<typename Scorer::State>;

  explicit EnsembleScorer(std::vector<Scorer> members)
      : members_(std::move(members)) {
    if (members_.empty())
      throw Error(ErrorCode::AlphabetMismatch, "empty ensemble");
    for (const auto& m : members_)
      if (m.alphabet_size() != members_[0].alphabet_size() ||
          m.length() != members_[0].length())
        throw Error(ErrorCode::AlphabetMismatch,
                    "ensemble members disagree on alphabet");
  }

  size_t length() const { return members_[0].length(); }
  int alphabet_size() const { return members_[0].alphabet_size(); }
  int start_symbol() const { return members_[0].start_symbol(); }

  State initial() const {
    State s;
    for (const auto& m : members_) s.push_back(m.initial());
    return s;
  }

  Vec step(const State& state, int prev, size_t pos, State& next) const {
    next.resize(members_.size());
    Vec avg(static_cast<size_t>(alphabet_size()), 0.0);
    for (size_t i = 0; i < members_.size(); ++i) {
      Vec lp = members_[i].step(state[i], prev, pos, next[i]);
      for (size_t k = 0; k < avg.size(); ++k) avg[k] += lp[k];
    }
    for (double& v : avg) v /= static_cast<double>(members_.size());
    double lse = nn::logsumexp(avg);
    for (double& v : avg) v -= lse;
    return avg;
  }

 private:
  std::vector<Scorer> members_;
};

}  // namespace edl::md

#endif  // EDL_MD_BEAM_HPP_
