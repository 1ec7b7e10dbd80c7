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

#ifndef EDL_NIL_CLUSTERING_HPP_
#define EDL_NIL_CLUSTERING_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "edl/corpus.hpp"
#include "edl/utf8.hpp"

namespace edl {

struct NilCluster {
  std::string cluster_id;
  std::vector<Mention> members;  // sorted by mention_less
};

namespace detail {

inline size_t midpoint_distance(const Mention& a, const Mention& b) {
  const size_t ma = a.char_start + a.char_end, mb = b.char_start + b.char_end;
  return ma > mb ? ma - mb : mb - ma;
}

}  // namespace detail

// Nearest named mention of the same document and type; earlier on ties.
inline const LinkedMention* nearest_named_same_type(const Mention& m,
                                                    const std::vector<LinkedMention>& all) {
  const LinkedMention* best = nullptr;
  size_t best_dist = 0;
  for (const auto& o : all) {
    const Mention& c = o.mention;
    if (c.kind != MentionKind::NAM || c.doc_id != m.doc_id ||
        c.entity_type != m.entity_type)
      continue;
    const size_t d = detail::midpoint_distance(m, c);
    if (!best || d < best_dist ||
        (d == best_dist && c.char_start < best->mention.char_start)) {
      best = &o;
      best_dist = d;
    }
  }
  return best;
}

// Named NIL mentions group by normalized surface across the corpus. A nominal
// NIL mention joins the cluster of its nearest same-type named mention when
// that mention is NIL; otherwise it stays alone. Ids are NIL0001, NIL0002, ...
// in order of each cluster's first member.
inline std::vector<NilCluster> cluster_nils(const std::vector<LinkedMention>& all) {
  std::vector<Mention> nils;
  for (const auto& lm : all)
    if (lm.target.is_nil()) nils.push_back(lm.mention);
  std::sort(nils.begin(), nils.end(), mention_less);

  std::vector<std::vector<Mention>> groups;
  std::map<std::string, size_t> by_surface;
  auto named_group = [&](const Mention& m) {
    auto [it, inserted] = by_surface.try_emplace(text::normalize(m.surface), groups.size());
    if (inserted) groups.emplace_back();
    return it->second;
  };
  for (const auto& m : nils)
    if (m.kind == MentionKind::NAM) groups[named_group(m)].push_back(m);
  for (const auto& m : nils) {
    if (m.kind == MentionKind::NAM) continue;
    const LinkedMention* anchor = nearest_named_same_type(m, all);
    if (anchor && anchor->target.is_nil()) {
      groups[named_group(anchor->mention)].push_back(m);
    } else {
      groups.push_back({m});
    }
  }

  std::vector<NilCluster> out;
  for (auto& g : groups) {
    if (g.empty()) continue;
    std::sort(g.begin(), g.end(), mention_less);
    out.push_back({{}, std::move(g)});
  }
  std::sort(out.begin(), out.end(), [](const NilCluster& a, const NilCluster& b) {
    return mention_less(a.members.front(), b.members.front());
  });
  for (size_t i = 0; i < out.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "NIL%04zu", i + 1);
    out[i].cluster_id = buf;
  }
  return out;
}

// Writes cluster ids into the NIL targets of `links`.
inline void assign_nil_ids(std::vector<LinkedMention>& links) {
  auto clusters = cluster_nils(links);
  std::map<decltype(mention_key(std::declval<Mention>())), std::string> ids;
  for (const auto& c : clusters)
    for (const auto& m : c.members) ids[mention_key(m)] = c.cluster_id;
  for (auto& lm : links)
    if (lm.target.is_nil()) lm.target.id = ids.at(mention_key(lm.mention));
}

}  // namespace edl

#endif  // EDL_NIL_CLUSTERING_HPP_
