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

#ifndef EDL_TESTS_TEST_SUPPORT_HPP_
#define EDL_TESTS_TEST_SUPPORT_HPP_

// Random generators and brute-force oracles shared by the unit and
// acceptance suites. Nothing here calls into the code paths it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "edl/el/ranker.hpp"
#include "edl/md/beam.hpp"
#include "edl/md/models.hpp"
#include "edl/nested_codec.hpp"
#include "edl/random.hpp"

namespace edl::testing {

inline codec::Span random_label_span(Rng& rng, size_t start, size_t end) {
  return {start, end, kAllEntityTypes[rng.below(5)], kAllKinds[rng.below(2)]};
}

// Spans inside [lo, hi): disjoint siblings, each possibly holding strictly
// smaller nested children.
inline void random_nested(Rng& rng, size_t lo, size_t hi, int depth,
                          codec::NestedLabeling& out) {
  size_t pos = lo;
  while (pos < hi) {
    if (rng.uniform() < 0.5) {
      ++pos;
      continue;
    }
    size_t len = 1 + rng.below(hi - pos);
    codec::Span s = random_label_span(rng, pos, pos + len);
    out.push_back(s);
    if (depth > 0 && len > 1 && rng.uniform() < 0.6) {
      // Strict sub-interval so nesting is proper.
      size_t a = pos + rng.below(len);
      size_t b = a + 1 + rng.below(pos + len - a);
      if (b - a < len) {
        codec::NestedLabeling inner;
        random_nested(rng, a, b, depth - 1, inner);
        for (const auto& c : inner)
          if (!(c.token_start == s.token_start && c.token_end == s.token_end))
            out.push_back(c);
      }
    }
    pos += len;
  }
}

inline codec::NestedLabeling random_labeling(Rng& rng, size_t length,
                                             int depth = 3) {
  codec::NestedLabeling out;
  random_nested(rng, 0, length, depth, out);
  return codec::canonical(std::move(out));
}

inline codec::NestedLabeling random_flat_labeling(Rng& rng, size_t length) {
  codec::NestedLabeling out;
  random_nested(rng, 0, length, 0, out);
  return codec::canonical(std::move(out));
}

inline std::vector<codec::Symbol> random_symbols(Rng& rng, size_t n) {
  std::vector<codec::Symbol> out;
  for (size_t i = 0; i < n; ++i) {
    int id = static_cast<int>(rng.below(codec::kSymbolCount - 1));
    out.push_back(codec::symbol_from_id(id));
  }
  return out;
}

// Calls fn(perm) for every injective map from [0, rows) into [0, cols) when
// rows <= cols, encoded as perm[row] = col.
inline void for_each_injection(size_t rows, size_t cols,
                               const std::function<void(const std::vector<size_t>&)>& fn) {
  std::vector<size_t> perm(rows);
  std::vector<bool> used(cols, false);
  std::function<void(size_t)> rec = [&](size_t r) {
    if (r == rows) {
      fn(perm);
      return;
    }
    for (size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = true;
      perm[r] = c;
      rec(r + 1);
      used[c] = false;
    }
  };
  rec(0);
}

// Maximum-weight one-to-one assignment by exhaustive search.
inline double brute_force_assignment(const std::vector<std::vector<double>>& m) {
  if (m.empty() || m[0].empty()) return 0;
  const size_t rows = m.size(), cols = m[0].size();
  double best = -1e300;
  if (rows <= cols) {
    for_each_injection(rows, cols, [&](const std::vector<size_t>& p) {
      double s = 0;
      for (size_t r = 0; r < rows; ++r) s += m[r][p[r]];
      best = std::max(best, s);
    });
  } else {
    for_each_injection(cols, rows, [&](const std::vector<size_t>& p) {
      double s = 0;
      for (size_t c = 0; c < cols; ++c) s += m[p[c]][c];
      best = std::max(best, s);
    });
  }
  return best;
}

// Levenshtein distance by full recursion with memo, written independently of
// the library's two-row implementation.
template <typename Seq>
size_t reference_edit_distance(const Seq& a, const Seq& b) {
  std::vector<std::vector<size_t>> memo(a.size() + 1,
                                        std::vector<size_t>(b.size() + 1, SIZE_MAX));
  std::function<size_t(size_t, size_t)> go = [&](size_t i, size_t j) -> size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    size_t& m = memo[i][j];
    if (m != SIZE_MAX) return m;
    size_t sub = go(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
    m = std::min({sub, go(i - 1, j) + 1, go(i, j - 1) + 1});
    return m;
  };
  return go(a.size(), b.size());
}

// Sum over every complete tag sequence of the product of step probabilities.
inline double total_probability(const md::CrnnlmScorer& scorer, const nn::Vec& state, int prev,
                         size_t pos) {
  if (pos == scorer.length()) return 1.0;
  nn::Vec next;
  nn::Vec lp = scorer.step(state, prev, pos, next);
  double total = 0;
  for (int tag = 0; tag < codec::kTagCount; ++tag)
    total += std::exp(lp[static_cast<size_t>(tag)]) *
             total_probability(scorer, next, tag, pos + 1);
  return total;
}

// Exhaustive best BIO-consistent path.
inline double exhaustive_flat(const md::CrnnlmScorer& scorer, const md::FlatMask& mask,
                       const nn::Vec& state, int prev, size_t pos,
                       std::vector<int>& path, std::vector<int>& best_path) {
  if (pos == scorer.length()) {
    best_path = path;
    return 0.0;
  }
  nn::Vec next;
  nn::Vec lp = scorer.step(state, prev, pos, next);
  double best = md::kNegInf;
  for (int tag = 0; tag < codec::kTagCount; ++tag) {
    if (!mask.permits(prev, tag)) continue;
    path.push_back(tag);
    std::vector<int> sub;
    double s = lp[static_cast<size_t>(tag)] +
               exhaustive_flat(scorer, mask, next, tag, pos + 1, path, sub);
    path.pop_back();
    if (s > best) {
      best = s;
      best_path = sub;
    }
  }
  return best;
}

// Linking instances whose gold candidate is identifiable from its edit and
// tf-idf bins; one in five has Nil as gold.
inline std::vector<el::LinkingInstance> separable_instances(Rng& rng, size_t n) {
  std::vector<el::LinkingInstance> out;
  for (size_t i = 0; i < n; ++i) {
    el::LinkingInstance inst;
    const size_t k = 2 + rng.below(5);
    const bool nil_gold = rng.below(5) == 0;
    const size_t gold = nil_gold ? k : rng.below(k);
    for (size_t c = 0; c < k; ++c) {
      el::RawFeatures f;
      f.kb_id = "e" + std::to_string(c);
      f.mention_words = {"w" + std::to_string(rng.below(20))};
      f.name_words = {"w" + std::to_string(rng.below(20))};
      f.type = static_cast<int>(rng.below(5));
      f.hot = static_cast<int>(rng.below(10));
      f.edit = c == gold ? 0 : 1 + static_cast<int>(rng.below(9));
      f.tfidf = c == gold ? 7 + static_cast<int>(rng.below(3))
                          : static_cast<int>(rng.below(7));
      f.translation = f.edit;
      inst.candidates.push_back(f);
    }
    el::RawFeatures nil;
    nil.nil = true;
    nil.mention_words = inst.candidates[0].mention_words;
    inst.candidates.push_back(nil);
    inst.gold = gold;
    out.push_back(inst);
  }
  return out;
}

inline el::EncodedCandidate random_candidate(Rng& rng, size_t vocab, bool nil = false) {
  el::EncodedCandidate c;
  for (size_t k = 1 + rng.below(3); k > 0; --k)
    c.mention_ids.push_back(static_cast<int>(rng.below(vocab)));
  c.nil = nil;
  if (!nil)
    for (size_t k = 1 + rng.below(3); k > 0; --k)
      c.name_ids.push_back(static_cast<int>(rng.below(vocab)));
  for (int k = 0; k < 6; ++k)
    c.onehot[k] = static_cast<int>(rng.below(static_cast<size_t>(el::kProjections[k].width)));
  return c;
}

}  // namespace edl::testing

#endif  // EDL_TESTS_TEST_SUPPORT_HPP_
