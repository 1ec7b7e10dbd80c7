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

#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "edl/kb/edit_distance.hpp"
#include "edl/kb/knowledge_base.hpp"
#include "test_support.hpp"

namespace edl::kb {
namespace {

KbEntity entity(std::string id, std::string name, std::vector<std::string> aliases,
                std::uint64_t links, std::string desc = "") {
  KbEntity e;
  e.kb_id = std::move(id);
  e.canonical_name = std::move(name);
  e.aliases = std::move(aliases);
  e.links_count = links;
  e.description = std::move(desc);
  return e;
}

KnowledgeBase bush_kb() {
  auto gwb = entity("m.01", "George W. Bush", {"George W. Bush", "Bush"}, 900,
                    "43rd president of the United States");
  auto ghwb = entity("m.02", "George H. W. Bush", {"Bush"}, 700,
                     "41st president of the United States");
  auto uk = entity("m.03", "United Kingdom", {"England"}, 500,
                   "country in western Europe");
  uk.redirect_titles = {"Britain"};
  uk.disambiguation_titles = {"UK (disambiguation)"};
  return KnowledgeBase({gwb, ghwb, uk});
}

TEST(EditDistance, Examples) {
  EXPECT_EQ(char_edit_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(char_edit_distance("", "abc"), 3u);
  EXPECT_EQ(char_edit_distance("George Bush", "George W. Bush"), 3u);
  EXPECT_EQ(char_edit_distance("北京", "北平"), 1u);
  EXPECT_EQ(word_edit_distance("George Bush", "George W. Bush"), 1u);
  EXPECT_EQ(word_edit_distance("a b c", "a b c"), 0u);
}

TEST(EditDistance, MatchesReferenceAndBoundedAgrees) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string a, b;
    for (size_t i = rng.below(9); i > 0; --i) a.push_back("abc"[rng.below(3)]);
    for (size_t i = rng.below(9); i > 0; --i) b.push_back("abc"[rng.below(3)]);
    const size_t d = edit_distance(a, b);
    EXPECT_EQ(d, testing::reference_edit_distance(a, b));
    EXPECT_EQ(d, edit_distance(b, a));
    for (size_t k = 0; k < 5; ++k)
      EXPECT_EQ(edit_distance_within(a, b, k), d <= k) << a << " " << b << " " << k;
  }
}

TEST(HotBin, Examples) {
  EXPECT_EQ(hot_bin(0), 0);
  EXPECT_EQ(hot_bin(1), 1);
  EXPECT_EQ(hot_bin(2), 1);
  EXPECT_EQ(hot_bin(3), 2);
  EXPECT_EQ(hot_bin(1000), 9);
  EXPECT_EQ(hot_bin(std::numeric_limits<std::uint64_t>::max()), 9);
}

TEST(HotBin, MonotoneAndMatchesLog2) {
  int prev = 0;
  for (std::uint64_t n = 0; n < 5000; ++n) {
    const int b = hot_bin(n);
    EXPECT_GE(b, prev);
    EXPECT_EQ(b, std::min(9, static_cast<int>(std::floor(std::log2(1.0 + n)))));
    prev = b;
  }
}

TEST(Build, SharedAliasAndDuplicates) {
  auto kb = bush_kb();
  EXPECT_EQ(kb.exact_lookup("Bush"), (std::vector<std::string>{"m.01", "m.02"}));
  try {
    KnowledgeBase({entity("x", "A", {}, 0), entity("x", "B", {}, 0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateKbId);
  }
}

TEST(Build, CanonicalNameIsAnAlias) {
  KnowledgeBase kb({entity("x", "Springfield", {"Capital City"}, 3)});
  EXPECT_EQ(kb.exact_lookup("springfield"), std::vector<std::string>{"x"});
  const auto& aliases = kb.at("x").aliases;
  EXPECT_NE(std::find(aliases.begin(), aliases.end(), "Springfield"), aliases.end());
}

TEST(Build, EmptyKb) {
  KnowledgeBase kb;
  EXPECT_TRUE(kb.exact_lookup("anything").empty());
  EXPECT_TRUE(kb.fuzzy_search("anything").empty());
  EXPECT_TRUE(kb.document_search("anything").empty());
}

TEST(Build, Deterministic) {
  std::ostringstream a, b;
  write_index(a, bush_kb());
  write_index(b, bush_kb());
  EXPECT_EQ(a.str(), b.str());
}

TEST(Exact, CaseFoldingRedirectsAndUnknown) {
  auto kb = bush_kb();
  EXPECT_EQ(kb.exact_lookup("ENGLAND"), std::vector<std::string>{"m.03"});
  EXPECT_EQ(kb.exact_lookup("  britain "), std::vector<std::string>{"m.03"});
  EXPECT_EQ(kb.exact_lookup("uk (Disambiguation)"), std::vector<std::string>{"m.03"});
  EXPECT_TRUE(kb.exact_lookup("Atlantis").empty());
}

TEST(Fuzzy, PartialNameScore) {
  auto r = bush_kb().fuzzy_search("George Bush");
  ASSERT_FALSE(r.empty());
  auto it = std::find_if(r.begin(), r.end(),
                         [](const ScoredEntity& s) { return s.kb_id == "m.01"; });
  ASSERT_NE(it, r.end());
  EXPECT_DOUBLE_EQ(it->score, 1.0 - 3.0 / 14.0);
}

TEST(Fuzzy, ExactMatchRanksFirst) {
  auto r = bush_kb().fuzzy_search("england");
  ASSERT_FALSE(r.empty());
  EXPECT_EQ(r[0], (ScoredEntity{"m.03", 1.0}));
}

TEST(Fuzzy, TiesBrokenByLinksThenId) {
  auto r = bush_kb().fuzzy_search("bush");
  ASSERT_GE(r.size(), 2u);
  EXPECT_EQ(r[0].kb_id, "m.01");  // 900 links
  EXPECT_EQ(r[1].kb_id, "m.02");
  EXPECT_EQ(r[0].score, 1.0);
  EXPECT_EQ(r[1].score, 1.0);
}

TEST(Fuzzy, SingleTokenTypoAndAbsent) {
  auto kb = bush_kb();
  auto r = kb.fuzzy_search("Englnd");
  ASSERT_FALSE(r.empty());
  EXPECT_EQ(r[0].kb_id, "m.03");
  EXPECT_TRUE(kb.fuzzy_search("Zanzibar").empty());
  EXPECT_TRUE(kb.fuzzy_search("Zanzibar Republic").empty());
  EXPECT_EQ(kb.fuzzy_search("bush", 1).size(), 1u);
  EXPECT_THROW(kb.fuzzy_search("bush", 0), Error);
}

std::vector<std::string> kWords = {"alpha", "beta",  "gamma", "delta", "river",
                                   "city",  "north", "south", "party", "club",
                                   "union", "bank",  "lake",  "port",  "saint"};

std::vector<KbEntity> random_entities(Rng& rng, size_t n) {
  std::vector<KbEntity> out;
  for (size_t i = 0; i < n; ++i) {
    auto phrase = [&](size_t len) {
      std::vector<std::string> w;
      for (size_t k = 0; k < len; ++k) w.push_back(rng.pick(kWords));
      return text::join(w, " ");
    };
    KbEntity e = entity("e" + std::to_string(100 + i), phrase(1 + rng.below(3)),
                        {}, rng.below(2000), phrase(rng.below(12)));
    for (size_t k = rng.below(3); k > 0; --k) e.aliases.push_back(phrase(1 + rng.below(3)));
    if (rng.below(4) == 0) e.redirect_titles.push_back(phrase(2));
    out.push_back(e);
  }
  return out;
}

TEST(Fuzzy, ExactResultsAreIncludedAndOutrankOthers) {
  Rng rng(2);
  KnowledgeBase kb(random_entities(rng, 80));
  for (int trial = 0; trial < 200; ++trial) {
    std::string q;
    for (size_t k = 1 + rng.below(3); k > 0; --k)
      q += (q.empty() ? "" : " ") + rng.pick(kWords);
    if (rng.below(2)) std::transform(q.begin(), q.end(), q.begin(), ::toupper);
    auto exact = kb.exact_lookup(q);
    auto fuzzy = kb.fuzzy_search(q);
    for (size_t i = 0; i < fuzzy.size(); ++i) {
      bool is_exact = std::count(exact.begin(), exact.end(), fuzzy[i].kb_id) > 0;
      EXPECT_EQ(is_exact, fuzzy[i].score == 1.0);
      if (i > 0) EXPECT_LE(fuzzy[i].score, fuzzy[i - 1].score);
    }
    for (const auto& id : exact)
      EXPECT_TRUE(std::any_of(fuzzy.begin(), fuzzy.end(),
                              [&](const ScoredEntity& s) { return s.kb_id == id; }));
  }
}

TEST(Document, SelfSimilarityAndNoOverlap) {
  auto kb = bush_kb();
  auto r = kb.document_search("country in western Europe");
  ASSERT_FALSE(r.empty());
  EXPECT_EQ(r[0].kb_id, "m.03");
  EXPECT_NEAR(r[0].score, 1.0, 1e-9);
  EXPECT_TRUE(kb.document_search("zebra quokka").empty());
  EXPECT_TRUE(kb.document_search("").empty());
}

// Independent tf-idf cosine over all entities.
std::vector<ScoredEntity> brute_force_cosine(const std::vector<KbEntity>& es,
                                             const std::string& doc) {
  std::map<std::string, size_t> df;
  std::vector<std::map<std::string, double>> tf(es.size());
  for (size_t i = 0; i < es.size(); ++i) {
    for (auto& t : text::terms(es[i].description)) tf[i][t] += 1;
    for (auto& [t, _] : tf[i]) ++df[t];
  }
  auto idf = [&](const std::string& t) {
    auto it = df.find(t);
    return it == df.end() ? 0.0
                          : std::log(1.0 + double(es.size()) / double(it->second));
  };
  std::map<std::string, double> q;
  for (auto& t : text::terms(doc)) q[t] += 1;
  std::vector<std::pair<double, size_t>> scored;
  for (size_t i = 0; i < es.size(); ++i) {
    double dot = 0, nq = 0, ne = 0;
    for (auto& [t, c] : q) nq += std::pow(c * idf(t), 2);
    for (auto& [t, c] : tf[i]) {
      ne += std::pow(c * idf(t), 2);
      auto it = q.find(t);
      if (it != q.end()) dot += c * idf(t) * it->second * idf(t);
    }
    if (dot > 0) scored.push_back({dot / std::sqrt(nq * ne), i});
  }
  std::sort(scored.begin(), scored.end(), [&](auto& a, auto& b) {
    if (std::fabs(a.first - b.first) > 1e-12) return a.first > b.first;
    if (es[a.second].links_count != es[b.second].links_count)
      return es[a.second].links_count > es[b.second].links_count;
    return es[a.second].kb_id < es[b.second].kb_id;
  });
  std::vector<ScoredEntity> out;
  for (auto& [s, i] : scored) out.push_back({es[i].kb_id, s});
  return out;
}

TEST(Document, MatchesBruteForceCosine) {
  Rng rng(3);
  auto es = random_entities(rng, 50);
  KnowledgeBase kb(es);
  for (int trial = 0; trial < 100; ++trial) {
    std::string doc;
    for (size_t k = 1 + rng.below(10); k > 0; --k) doc += rng.pick(kWords) + " ";
    auto got = kb.document_search(doc);
    auto want = brute_force_cosine(es, doc);
    ASSERT_EQ(got.size(), want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i].score, want[i].score, 1e-9);
      EXPECT_GE(got[i].score, 0.0);
      EXPECT_LE(got[i].score, 1.0);
      if (i + 1 < got.size() && std::fabs(want[i].score - want[i + 1].score) > 1e-9)
        EXPECT_EQ(got[i].kb_id, want[i].kb_id);
    }
  }
}

TEST(Document, IdfIsFinite) {
  Rng rng(4);
  KnowledgeBase kb(random_entities(rng, 30));
  for (const auto& w : kWords) EXPECT_TRUE(std::isfinite(kb.idf(w)));
}

TEST(Concurrency, ParallelReadsMatchSerial) {
  Rng rng(5);
  KnowledgeBase kb(random_entities(rng, 60));
  std::vector<std::string> queries;
  for (int i = 0; i < 40; ++i) queries.push_back(rng.pick(kWords) + " " + rng.pick(kWords));
  std::vector<std::vector<ScoredEntity>> serial, parallel(queries.size());
  for (const auto& q : queries) serial.push_back(kb.fuzzy_search(q));
  std::vector<std::thread> threads;
  for (size_t t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (size_t i = t; i < queries.size(); i += 4) parallel[i] = kb.fuzzy_search(queries[i]);
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(serial, parallel);
}

TEST(Aux, Tables) {
  AuxTables aux;
  aux.add_abbreviation("UK", "United Kingdom");
  aux.add_zh_variant("国", "國");
  aux.add_translation("Estados Unidos", "United States");
  EXPECT_EQ(aux.expansions("uk"), std::vector<std::string>{"United Kingdom"});
  EXPECT_TRUE(aux.expansions("USA").empty());
  EXPECT_EQ(aux.zh_variant("中国"), std::optional<std::string>("中國"));
  EXPECT_EQ(aux.zh_variant("中國"), std::optional<std::string>("中国"));
  EXPECT_EQ(aux.zh_variant("abc"), std::nullopt);
  EXPECT_EQ(aux.translate("ESTADOS unidos"), std::optional<std::string>("United States"));
  EXPECT_EQ(aux.translate("Francia"), std::nullopt);
}

TEST(Files, EntityRoundTrip) {
  auto kb = bush_kb();
  std::ostringstream out;
  write_entities(out, kb.entities());
  std::istringstream in(out.str());
  auto back = read_entities(in);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[2].redirect_titles, std::vector<std::string>{"Britain"});
  EXPECT_EQ(back[0].aliases, kb.entities()[0].aliases);
  std::ostringstream again;
  write_entities(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Files, IndexRoundTrip) {
  AuxTables aux;
  aux.add_abbreviation("UK", "United Kingdom");
  aux.add_zh_variant("国", "國");
  KnowledgeBase kb(bush_kb().entities(), aux);
  std::ostringstream out;
  write_index(out, kb);
  std::istringstream in(out.str());
  auto back = read_index(in);
  std::ostringstream again;
  write_index(again, back);
  EXPECT_EQ(again.str(), out.str());
  EXPECT_EQ(back.aux().expansions("UK").size(), 1u);
}

TEST(Files, MalformedRecords) {
  std::istringstream bad_fields("m.1\tA\tA\t3\n");
  EXPECT_THROW(read_entities(bad_fields), Error);
  std::istringstream bad_links("m.1\tA\tA\t-3\td\t\t\t\n");
  try {
    read_entities(bad_links, "kb.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedInput);
    EXPECT_NE(e.detail().find("kb.tsv:1"), std::string::npos);
  }
  std::istringstream aux_bad("only-one-column\n");
  AuxTables aux;
  EXPECT_THROW(read_aux(aux_bad, AuxKind::Abbreviations, aux), Error);
}

}  // namespace
}  // namespace edl::kb
