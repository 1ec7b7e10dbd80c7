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

#ifndef EDL_KB_EDIT_DISTANCE_HPP_
#define EDL_KB_EDIT_DISTANCE_HPP_

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "edl/utf8.hpp"

namespace edl {

// Levenshtein distance with unit costs over any random-access sequences.
template <typename A, typename B>
size_t edit_distance(const A& a, const B& b) {
  const size_t n = std::size(a), m = std::size(b);
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<size_t> prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), size_t{0});
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Whether the distance is at most `bound`; banded, so cheap for small bounds.
template <typename A, typename B>
bool edit_distance_within(const A& a, const B& b, size_t bound) {
  const size_t n = std::size(a), m = std::size(b);
  if ((n > m ? n - m : m - n) > bound) return false;
  const size_t inf = bound + 1;
  std::vector<size_t> prev(m + 1, inf), cur(m + 1, inf);
  for (size_t j = 0; j <= std::min(m, bound); ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    const size_t lo = i > bound ? i - bound : 1;
    const size_t hi = std::min(m, i + bound);
    std::fill(cur.begin(), cur.end(), inf);
    if (i <= bound) cur[0] = i;
    size_t row_min = cur[0];
    for (size_t j = lo; j <= hi; ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub, inf});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > bound) return false;
    std::swap(prev, cur);
  }
  return prev[m] <= bound;
}

// Over Unicode scalar values.
inline size_t char_edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(text::decode(a), text::decode(b));
}

// Over whitespace-separated words (CJK characters count as words).
inline size_t word_edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(text::words(a), text::words(b));
}

}  // namespace edl

#endif  // EDL_KB_EDIT_DISTANCE_HPP_
