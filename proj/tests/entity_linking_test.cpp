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
#include <sstream>

#include <gtest/gtest.h>

#include "edl/el/candidates.hpp"
#include "edl/el/features.hpp"
#include "edl/el/queries.hpp"
#include "edl/el/ranker.hpp"
#include "edl/neural/grad_check.hpp"
#include "test_support.hpp"

namespace edl::el {
namespace {

Mention mention(std::string surface, size_t start, MentionKind kind = MentionKind::NAM,
                EntityType type = EntityType::PER) {
  Mention m;
  m.doc_id = "D";
  m.surface = std::move(surface);
  m.char_start = start;
  m.char_end = start + text::length(m.surface);
  m.kind = kind;
  m.entity_type = type;
  return m;
}

kb::KbEntity entity(std::string id, std::string name, std::vector<std::string> aliases,
                    std::uint64_t links, std::string desc = "") {
  kb::KbEntity e;
  e.kb_id = std::move(id);
  e.canonical_name = std::move(name);
  e.aliases = std::move(aliases);
  e.links_count = links;
  e.description = std::move(desc);
  return e;
}

Document doc(std::string text, Language lang = Language::ENG) {
  return {"D", std::move(text), Category::NewsReport, lang};
}

TEST(Queries, LongerMentionsAreAdded) {
  auto bush = mention("Bush", 30);
  std::vector<Mention> all = {mention("George Bush", 0), bush};
  auto q = expand_queries(bush, all, {});
  EXPECT_EQ(q.items(), (std::vector<std::string>{"Bush", "George Bush"}));
}

TEST(Queries, AbbreviationExpansion) {
  kb::AuxTables aux;
  aux.add_abbreviation("SC", "South Carolina");
  auto sc = mention("sc", 0, MentionKind::NAM, EntityType::GPE);
  auto q = expand_queries(sc, {sc}, aux);
  EXPECT_TRUE(q.contains("sc"));
  EXPECT_TRUE(q.contains("South Carolina"));
}

TEST(Queries, NominalUsesNearestNamedMention) {
  auto far = mention("Joe Biden", 0);
  auto obama = mention("Barack Hussein Obama", 40);
  auto pres = mention("president", 70, MentionKind::NOM);
  auto q = expand_queries(pres, {far, obama, pres}, {});
  EXPECT_EQ(q.items(), (std::vector<std::string>{"president", "Barack Hussein Obama"}));
}

TEST(Queries, NearestNamedTieGoesEarlier) {
  // Midpoints 2.5, 13 and 23.5: equally far.
  auto a = mention("Alpha", 0);
  auto nom = mention("leader", 10, MentionKind::NOM);
  auto b = mention("Betas", 21);
  ASSERT_NE(nearest_named(nom, {b, a, nom}), nullptr);
  EXPECT_EQ(nearest_named(nom, {b, a, nom})->surface, "Alpha");
  EXPECT_EQ(nearest_named(nom, {nom}), nullptr);
}

TEST(Queries, ChineseVariantAndTranslation) {
  kb::AuxTables aux;
  aux.add_zh_variant("国", "國");
  aux.add_translation("Estados Unidos", "United States");
  auto zh = mention("中国", 0, MentionKind::NAM, EntityType::GPE);
  EXPECT_TRUE(expand_queries(zh, {zh}, aux).contains("中國"));
  auto es = mention("Estados Unidos", 0, MentionKind::NAM, EntityType::GPE);
  auto longer = mention("United States Navy", 40, MentionKind::NAM, EntityType::ORG);
  auto q = expand_queries(es, {es, longer}, aux);
  EXPECT_TRUE(q.contains("United States"));
  EXPECT_TRUE(q.contains("United States Navy"));
}

TEST(Queries, NoCaseFoldedDuplicates) {
  auto m = mention("bush", 20);
  auto q = expand_queries(m, {mention("BUSH", 0), m, mention("George  Bush", 40),
                              mention("george bush", 60)},
                          {});
  EXPECT_EQ(q.size(), 2u);
  EXPECT_EQ(q.items()[0], "bush");
}

kb::KnowledgeBase sample_kb() {
  return kb::KnowledgeBase({
      entity("m.bush43", "George W. Bush", {"Bush", "George Bush"}, 900,
             "president of the united states texas"),
      entity("m.bush41", "George H. W. Bush", {"Bush"}, 700,
             "president of the united states"),
      entity("m.bushes", "Kate Bush", {}, 300, "english singer"),
      entity("m.bushnell", "Bushnell", {}, 10, "city in florida"),
      entity("m.sc", "South Carolina", {}, 400, "state in the united states"),
      entity("m.texas", "Texas", {}, 600, "state texas"),
  });
}

TEST(Candidates, ExactAliasIsAlwaysListed) {
  auto kb = sample_kb();
  auto d = doc("nothing relevant here");
  auto list = candidates_for_queries({"Bushnell"}, d, kb);
  EXPECT_TRUE(list.contains("m.bushnell"));
  EXPECT_TRUE(list.items.back().nil);
}

TEST(Candidates, EmptyResultsGiveOnlyNil) {
  auto list = candidates_for_queries({"Zanzibar Republic"}, doc("x"), sample_kb());
  ASSERT_EQ(list.size(), 1u);
  EXPECT_TRUE(list.items[0].nil);
}

TEST(Candidates, NilOnceAndUniqueEntries) {
  auto kb = sample_kb();
  auto list = candidates_for_queries({"Bush", "bush", "George Bush", "Kate Bush"},
                                     doc("president of the united states"), kb);
  size_t nils = 0;
  std::set<std::string> ids;
  for (const auto& c : list.items) {
    if (c.nil) ++nils;
    else EXPECT_TRUE(ids.insert(c.kb_id).second);
  }
  EXPECT_EQ(nils, 1u);
}

TEST(Candidates, TopNBound) {
  auto kb = sample_kb();
  auto d = doc("a singer from texas");
  for (std::vector<std::string> qs :
       {std::vector<std::string>{"Bush"}, {"Bush", "Texas"}, {"Kate", "South"}}) {
    auto list = candidates_for_queries(qs, d, kb);
    auto r1 = result1(qs, kb);
    std::set<std::string> r2;
    for (auto& e : kb.document_search(d.text)) r2.insert(e.kb_id);
    size_t inter = 0;
    for (auto& e : r1) inter += r2.count(e.kb_id);
    std::set<std::string> exact;
    for (auto& q : qs)
      for (auto& id : kb.exact_lookup(q)) exact.insert(id);
    EXPECT_LE(list.size(), 3 + inter + exact.size() + 1);
  }
}

TEST(Candidates, TopNPerLanguage) {
  CandidateConfig cfg;
  EXPECT_EQ(cfg.top_n(Language::ENG), 3u);
  EXPECT_EQ(cfg.top_n(Language::SPA), 3u);
  EXPECT_EQ(cfg.top_n(Language::CMN), 30u);
}

// A global top-N means a new query can displace a fuzzy-only entry from the
// top N. Everything else is monotone: Result1 only grows, and any dropped
// entry was a top-N entry outranked by N entries of the larger Result1.
TEST(Candidates, AddingQueriesOnlyDisplacesTopNEntries) {
  auto kb = sample_kb();
  const std::vector<std::string> pool = {"Bush", "George", "Texas", "Kate Bush",
                                         "Bushnel", "South Carolina", "Carolina"};
  Rng rng(1);
  auto d = doc("president texas");
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> small, large;
    for (const auto& q : pool) {
      const auto r = rng.below(3);
      if (r == 0) small.push_back(q);
      if (r <= 1) large.push_back(q);
    }
    auto r1_small = result1(small, kb), r1_large = result1(large, kb);
    std::map<std::string, size_t> rank_large;
    for (size_t i = 0; i < r1_large.size(); ++i) rank_large[r1_large[i].kb_id] = i;
    for (const auto& e : r1_small) EXPECT_TRUE(rank_large.count(e.kb_id));
    auto a = candidates_for_queries(small, d, kb);
    auto b = candidates_for_queries(large, d, kb);
    for (const auto& c : a.items) {
      if (c.nil || b.contains(c.kb_id)) continue;
      EXPECT_GE(rank_large.at(c.kb_id), 3u) << c.kb_id;
    }
  }
}

TEST(Metrics, CoverageAndAverageCount) {
  auto kb = sample_kb();
  std::vector<GoldLink> gold(3);
  gold[0].target = LinkTarget::kb("a");
  gold[1].target = LinkTarget::kb("b");
  gold[2].target = LinkTarget::nil();
  CandidateList l1, l2, l3;
  l1.items = {Candidate::kb("a"), Candidate::kb("x"), Candidate::kb("y"),
              Candidate::nil_candidate()};
  l2.items = {Candidate::kb("b"), Candidate::kb("p"), Candidate::kb("q"),
              Candidate::kb("r"), Candidate::kb("s"), Candidate::nil_candidate()};
  l3.items = {Candidate::nil_candidate()};
  auto m = candidate_metrics(gold, {l1, l2, l3});
  EXPECT_DOUBLE_EQ(m.coverage, 1.0);
  EXPECT_DOUBLE_EQ(m.avg_count, 4.0);
  l2.items.erase(l2.items.begin());
  EXPECT_DOUBLE_EQ(candidate_metrics(gold, {l1, l2, l3}).coverage, 0.5);
  try {
    candidate_metrics({gold[2]}, {l3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(Metrics, ReportFormat) {
  std::ostringstream out;
  write_candidate_report(out, {{Language::ENG, {0.93, 22.6, 10}},
                               {Language::CMN, {1.0, 4.0, 3}}});
  EXPECT_EQ(out.str(),
            "Language\tCoverage\tAvgCount\nENG\t0.930\t22.60\nCMN\t1.000\t4.00\n");
}

TEST(Features, WordEditDistanceExample) {
  EXPECT_EQ(word_edit_distance("George Bush", "George W. Bush"), 1u);
}

TEST(Features, WordEditDistanceIsAMetric) {
  const std::vector<std::string> words = {"a", "b", "c", "dd"};
  Rng rng(2);
  auto phrase = [&] {
    std::string s;
    for (size_t k = rng.below(5); k > 0; --k) s += rng.pick(words) + " ";
    return s;
  };
  for (int trial = 0; trial < 500; ++trial) {
    auto x = phrase(), y = phrase(), z = phrase();
    EXPECT_EQ(word_edit_distance(x, x), 0u);
    EXPECT_EQ(word_edit_distance(x, y), word_edit_distance(y, x));
    EXPECT_EQ(word_edit_distance(x, y) == 0, text::words(x) == text::words(y));
    EXPECT_LE(word_edit_distance(x, z), word_edit_distance(x, y) + word_edit_distance(y, z));
  }
}

TEST(Features, BinsForIdenticalInputs) {
  auto kb = kb::KnowledgeBase({entity("m.tx", "Texas", {}, 1000, "state texas")});
  auto m = mention("Texas", 0, MentionKind::NAM, EntityType::GPE);
  auto f = extract_features(m, doc("state texas"), Candidate::kb("m.tx"), kb);
  EXPECT_EQ(f.edit, 0);
  EXPECT_EQ(f.tfidf, 9);
  EXPECT_EQ(f.hot, 9);
  EXPECT_EQ(f.translation, 0);
  EXPECT_EQ(f.type, static_cast<int>(EntityType::GPE));
  EXPECT_EQ(f.name_words, std::vector<std::string>{"texas"});
}

TEST(Features, NilAndUnknownCandidate) {
  auto kb = sample_kb();
  auto m = mention("Bush", 0);
  auto f = extract_features(m, doc("x"), Candidate::nil_candidate(), kb);
  EXPECT_TRUE(f.nil);
  EXPECT_EQ(f.hot, 0);
  EXPECT_EQ(f.edit, 9);
  EXPECT_EQ(f.tfidf, 0);
  EXPECT_EQ(f.translation, 9);
  EXPECT_TRUE(f.name_words.empty());
  try {
    extract_features(m, doc("x"), Candidate::kb("m.none"), kb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownCandidate);
  }
}

TEST(Features, TranslationBin) {
  kb::AuxTables aux;
  aux.add_translation("Estados Unidos", "United States");
  auto e = entity("m.us", "Estados Unidos de America", {"Estados Unidos"}, 5, "");
  e.english_name = "United States";
  kb::KnowledgeBase kb({e, entity("m.mx", "Mexico", {}, 5, "")}, aux);
  auto m = mention("Estados Unidos", 0, MentionKind::NAM, EntityType::GPE);
  auto es = doc("x", Language::SPA);
  EXPECT_EQ(extract_features(m, es, Candidate::kb("m.us"), kb).translation, 0);
  EXPECT_EQ(extract_features(m, es, Candidate::kb("m.mx"), kb).translation, 2);
  auto other = mention("Francia", 0, MentionKind::NAM, EntityType::GPE);
  EXPECT_EQ(extract_features(other, es, Candidate::kb("m.mx"), kb).translation, 9);
}

TEST(Features, VectorIs260AndDeterministic) {
  auto kb = sample_kb();
  auto m = mention("George Bush", 0);
  auto list = candidates_for_queries({"George Bush"}, doc("president texas"), kb);
  auto raw = extract_features(m, doc("president texas"), list, kb);
  EXPECT_EQ(raw, extract_features(m, doc("president texas"), list, kb));
  md::Vocab vocab;
  for (auto& f : raw)
    for (auto& w : f.name_words) vocab.add(w);
  RankerConfig cfg;
  auto params = init_ranker(cfg, vocab.size(), 1);
  for (const auto& f : raw) {
    auto x = feature_vector(params, encode_candidate(vocab, f));
    EXPECT_EQ(x.size(), 260u);
    EXPECT_EQ(x, feature_vector(params, encode_candidate(vocab, f)));
  }
}

using testing::random_candidate;

TEST(Rank, SingletonAndSymmetry) {
  RankerConfig cfg;
  auto params = init_ranker(cfg, 10, 3);
  Rng rng(3);
  auto nil = random_candidate(rng, 10, true);
  EXPECT_EQ(rank(params, {nil}).posterior, Vec{1.0});
  auto c = random_candidate(rng, 10);
  for (double p : rank(params, {c, c, c, c}).posterior) EXPECT_DOUBLE_EQ(p, 0.25);
  EXPECT_THROW(rank(params, {}), Error);
}

TEST(Rank, PosteriorIsProbabilityVector) {
  RankerConfig cfg;
  auto params = init_ranker(cfg, 20, 4);
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EncodedCandidate> list;
    for (size_t k = 1 + rng.below(50); k > 0; --k) list.push_back(random_candidate(rng, 20));
    double sum = 0;
    for (double p : rank(params, list).posterior) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

// Covers the word vectors, the Nil name vector, all six projections and the
// hidden layers.
TEST(Rank, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    Rng rng(seed);
    RankerConfig cfg;
    auto params = init_ranker(cfg, 12, seed);
    std::vector<EncodedCandidate> list;
    for (int k = 0; k < 4; ++k) list.push_back(random_candidate(rng, 12));
    list.push_back(random_candidate(rng, 12, true));
    const size_t gold = rng.below(list.size());
    auto loss = [&](ParameterStore& s) { return ranker_loss(s, list, gold, true); };
    auto r = nn::grad_check(loss, params, 1e-5, 0, seed, 1e-5);
    EXPECT_LT(r.max_rel_error, 1e-4)
        << r.worst_parameter << "[" << r.worst_index << "] " << r.worst_analytic
        << " vs " << r.worst_numeric;
  }
}

// Gold: exact name (edit bin 0) and a high similarity bin; distractors never
// have both.
using testing::separable_instances;

double ensemble_accuracy(const RankerEnsemble& ens, const std::vector<LinkingInstance>& data) {
  std::vector<const RankerModel*> models;
  for (const auto& m : ens.members) models.push_back(&m);
  size_t right = 0;
  for (const auto& inst : data) right += link(models, inst.candidates).index == *inst.gold;
  return static_cast<double>(right) / static_cast<double>(data.size());
}

TEST(Train, LearnsSeparableData) {
  Rng rng(8);
  auto train = separable_instances(rng, 200);
  auto test = separable_instances(rng, 100);
  RankerConfig cfg;
  cfg.members = 2;
  cfg.max_epochs = 15;
  auto ens = train_ranker(train, cfg);
  EXPECT_EQ(ens.members.size(), 2u);
  EXPECT_GE(ensemble_accuracy(ens, test), 0.95);
}

TEST(Train, FirstEpochLowersLossAndIsDeterministic) {
  Rng rng(9);
  auto data = separable_instances(rng, 80);
  md::Vocab vocab = build_ranker_vocab(data);
  std::vector<LinkExample> examples;
  for (const auto& inst : data) {
    LinkExample ex;
    for (const auto& f : inst.candidates) ex.candidates.push_back(encode_candidate(vocab, f));
    ex.gold = *inst.gold;
    examples.push_back(ex);
  }
  RankerConfig cfg;
  cfg.max_epochs = 3;
  auto init = init_ranker(cfg, vocab.size(), 1);
  const double before = mean_ranker_loss(init, examples);
  auto a = train_ranker_params(init, examples, {}, cfg);
  auto b = train_ranker_params(init, examples, {}, cfg);
  EXPECT_LT(a.dev_loss[0], before);
  EXPECT_TRUE(a.best.same_values(b.best));
}

TEST(Train, GoldMissingIsSkipped) {
  Rng rng(10);
  auto data = separable_instances(rng, 20);
  data[3].gold.reset();
  data[7].gold.reset();
  RankerConfig cfg;
  cfg.members = 1;
  cfg.max_epochs = 1;
  EXPECT_EQ(train_ranker(data, cfg).skipped, 2u);
  std::vector<LinkingInstance> none = {data[3]};
  EXPECT_THROW(train_ranker(none, cfg), Error);
}

TEST(Link, OnlyNil) {
  RankerModel m{RankerConfig{}, md::Vocab{}, init_ranker(RankerConfig{}, 1, 1)};
  RawFeatures nil;
  nil.nil = true;
  auto d = link({&m}, {nil});
  EXPECT_EQ(d.index, 0u);
  EXPECT_EQ(d.posterior, Vec{1.0});
}

TEST(Link, IdenticalMembersAndShiftInvariance) {
  Rng rng(11);
  auto data = separable_instances(rng, 30);
  RankerModel m{RankerConfig{}, build_ranker_vocab(data),
                init_ranker(RankerConfig{}, build_ranker_vocab(data).size(), 11)};
  for (const auto& inst : data) {
    auto one = link({&m}, inst.candidates);
    auto five = link({&m, &m, &m, &m, &m}, inst.candidates);
    EXPECT_EQ(one.index, five.index);
  }
  RankerModel shifted = m;
  shifted.params.at("score.b").value[0] += 7.5;
  for (const auto& inst : data) {
    auto a = link({&m}, inst.candidates);
    auto b = link({&shifted}, inst.candidates);
    EXPECT_EQ(a.index, b.index);
    for (size_t k = 0; k < a.posterior.size(); ++k)
      EXPECT_NEAR(a.posterior[k], b.posterior[k], 1e-12);
  }
}

TEST(Link, TiesPreferKbThenHotThenId) {
  RankerModel m{RankerConfig{}, md::Vocab{}, init_ranker(RankerConfig{}, 1, 1)};
  // Zero the score layer so every candidate scores the same.
  m.params.at("score.W").value.fill(0.0);
  RawFeatures nil, a, b, c;
  nil.nil = true;
  a.kb_id = "m.b";
  a.hot = 3;
  b.kb_id = "m.a";
  b.hot = 5;
  c.kb_id = "m.0";
  c.hot = 5;
  EXPECT_EQ(link({&m}, {nil, a}).index, 1u);
  EXPECT_EQ(link({&m}, {nil, a, b}).index, 2u);
  EXPECT_EQ(link({&m}, {nil, a, b, c}).index, 3u);
}

TEST(Model, CheckpointRoundTrip) {
  Rng rng(12);
  auto data = separable_instances(rng, 5);
  RankerModel m{RankerConfig{}, build_ranker_vocab(data), {}};
  m.params = init_ranker(m.config, m.vocab.size(), 12);
  auto back = RankerModel::from_checkpoint(m.to_checkpoint(99));
  EXPECT_TRUE(back.params.same_values(m.params));
  EXPECT_TRUE(back.config.same_shape(m.config));
  EXPECT_EQ(back.vocab.size(), m.vocab.size());
  RankerConfig p = RankerConfig::paper_scale();
  EXPECT_EQ(p.hidden1, 512u);
  EXPECT_EQ(p.hidden2, 256u);
}

}  // namespace
}  // namespace edl::el
