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


// Writes the bundled synthetic data: an overfit corpus with nested mentions,
// a 200-entity KB with its aux tables, a trilingual linking corpus and the
// mini end-to-end corpus. Output is a pure function of the seed.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "edl/corpus.hpp"
#include "edl/kb/knowledge_base.hpp"
#include "edl/random.hpp"

namespace {

namespace fs = std::filesystem;
using namespace edl;

// ---------------------------------------------------------------------------
// Document builder: appends text and records mentions by character offset.

struct DocBuilder {
  Document doc;
  std::vector<LinkedMention> gold;
  size_t length = 0;  // in characters
  bool spaced = true;  // CMN text has no spaces between tokens

  void raw(const std::string& s) {
    doc.text += s;
    length += text::length(s);
  }
  void word(const std::string& w) {
    if (spaced && length > 0 && doc.text.back() != '\n') raw(" ");
    raw(w);
  }
  // Appends a mention and returns its index in `gold`.
  size_t mention(const std::string& surface, EntityType t, MentionKind k, LinkTarget target) {
    if (spaced && length > 0 && doc.text.back() != '\n') raw(" ");
    LinkedMention lm;
    lm.mention.doc_id = doc.doc_id;
    lm.mention.char_start = length;
    raw(surface);
    lm.mention.char_end = length;
    lm.mention.surface = surface;
    lm.mention.entity_type = t;
    lm.mention.kind = k;
    lm.target = std::move(target);
    gold.push_back(std::move(lm));
    return gold.size() - 1;
  }
  void end_sentence(const std::string& stop) {
    if (spaced) word(stop);
    else raw(stop);
    raw("\n");
  }
};

void write_docs(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  write_documents(out, docs);
}

void write_gold(const std::string& path, std::vector<LinkedMention> gold) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  write_submission(out, std::move(gold), "GOLD");
}

// ---------------------------------------------------------------------------
// Overfit corpus: 50 ENG sentences over a small vocabulary with nested spans.

struct Phrase {
  std::vector<std::string> words;
  std::vector<std::tuple<size_t, size_t, EntityType, MentionKind>> spans;  // word offsets
};

Phrase nam(std::string s, EntityType t) {
  Phrase p;
  std::istringstream ss(s);
  for (std::string w; ss >> w;) p.words.push_back(w);
  p.spans.push_back({0, p.words.size(), t, MentionKind::NAM});
  return p;
}

// Outer mention with one inner named mention at word offset [a, b).
Phrase nested(std::string s, EntityType t, MentionKind k, size_t a, size_t b, EntityType inner) {
  Phrase p = nam(std::move(s), t);
  std::get<3>(p.spans[0]) = k;
  p.spans.push_back({a, b, inner, MentionKind::NAM});
  return p;
}

void overfit_corpus(const fs::path& dir, std::uint64_t seed) {
  using ET = EntityType;
  const std::vector<Phrase> per = {nam("John Smith", ET::PER), nam("Maria Lopez", ET::PER),
                                   nam("Wei Zhang", ET::PER), nam("Anna Berg", ET::PER),
                                   nested("mayor of Boston", ET::PER, MentionKind::NOM, 2, 3, ET::GPE),
                                   nested("governor of Ohio", ET::PER, MentionKind::NOM, 2, 3, ET::GPE)};
  const std::vector<Phrase> org = {
      nested("Kentucky Fried Chicken", ET::ORG, MentionKind::NAM, 0, 1, ET::GPE),
      nested("University of Texas", ET::ORG, MentionKind::NAM, 2, 3, ET::GPE),
      nested("Bank of China", ET::ORG, MentionKind::NAM, 2, 3, ET::GPE), nam("Acme", ET::ORG)};
  const std::vector<Phrase> gpe = {nam("Paris", ET::GPE), nam("Ohio", ET::GPE),
                                   nam("Texas", ET::GPE), nam("Boston", ET::GPE)};
  const std::vector<Phrase> fac = {nested("Boston Airport", ET::FAC, MentionKind::NAM, 0, 1, ET::GPE),
                                   nam("Central Station", ET::FAC)};
  const std::vector<Phrase> loc = {nam("Hudson River", ET::LOC), nam("Lake Erie", ET::LOC)};
  auto nom = [](const char* w, ET t) {
    Phrase p = nam(w, t);
    std::get<3>(p.spans[0]) = MentionKind::NOM;
    return p;
  };
  // Templates: literal words, or "$X" slots.
  const std::vector<std::vector<std::string>> templates = {
      {"$PER", "met", "$ORG", "$officials", "in", "$GPE", "."},
      {"the", "$company", "said", "$ORG", "will", "open", "near", "$FAC", "."},
      {"the", "$PER", "visited", "$LOC", "with", "$PER", "."},
      {"$PER", "flew", "from", "$FAC", "to", "$GPE", "."},
      {"the", "$city", "of", "$GPE", "hosted", "$ORG", "."},
  };
  Rng rng(seed);
  std::vector<Document> docs;
  std::vector<LinkedMention> gold;
  std::set<std::string> vocab;
  for (size_t d = 0; d < 10; ++d) {
    DocBuilder b;
    b.doc = {"overfit_" + std::to_string(d), "", Category::NewsReport, Language::ENG};
    for (size_t s = 0; s < 5; ++s) {
      const auto& tpl = templates[(d * 5 + s) % templates.size()];
      for (const auto& item : tpl) {
        Phrase p;
        if (item == "$PER") p = rng.pick(per);
        else if (item == "$ORG") p = rng.pick(org);
        else if (item == "$GPE") p = rng.pick(gpe);
        else if (item == "$FAC") p = rng.pick(fac);
        else if (item == "$LOC") p = rng.pick(loc);
        else if (item == "$officials") p = nom("officials", ET::PER);
        else if (item == "$company") p = nom("company", ET::ORG);
        else if (item == "$city") p = nom("city", ET::GPE);
        else p.words = {item};
        std::vector<size_t> starts, ends;
        for (const auto& w : p.words) {
          b.word(w);
          vocab.insert(w);
          ends.push_back(b.length);
          starts.push_back(b.length - text::length(w));
        }
        for (const auto& [a, e, t, k] : p.spans) {
          LinkedMention lm;
          lm.mention = {b.doc.doc_id, starts[a], ends[e - 1], "", t, k, 1.0};
          lm.mention.surface = substring(b.doc, starts[a], ends[e - 1]);
          lm.target = LinkTarget::nil("NIL0001");
          b.gold.push_back(lm);
        }
      }
      b.raw("\n");
    }
    for (auto& g : b.gold) g.mention.surface = substring(b.doc, g.mention.char_start, g.mention.char_end);
    docs.push_back(b.doc);
    gold.insert(gold.end(), b.gold.begin(), b.gold.end());
  }
  if (vocab.size() > 100) throw std::runtime_error("overfit vocabulary too large");
  fs::create_directories(dir);
  write_docs((dir / "docs.tsv").string(), docs);
  write_gold((dir / "gold.tsv").string(), gold);
}

// ---------------------------------------------------------------------------
// Knowledge base

struct SynthEntity {
  kb::KbEntity e;
  EntityType type;
  Language lang;
  std::string surname;       // persons
  std::string abbreviation;  // organizations
  std::string traditional;   // CMN: the other script
  std::string spanish;       // ENG entities with a Spanish rendering
};

struct World {
  std::vector<SynthEntity> entities;
  std::vector<std::pair<std::string, std::string>> abbreviations, variants, translations;
};

const char* kTopics[] = {"shipping", "banking",  "mining",   "farming", "software",
                         "railways", "textiles", "fisheries", "tourism", "energy"};

World build_world(std::uint64_t seed) {
  Rng rng(seed);
  World w;
  size_t next_id = 1;
  auto add = [&](std::string name, EntityType t, Language lang, std::vector<std::string> aliases,
                 std::string desc) -> SynthEntity& {
    SynthEntity s;
    char id[16];
    std::snprintf(id, sizeof(id), "m.%04zu", next_id++);
    s.e.kb_id = id;
    s.e.canonical_name = std::move(name);
    s.e.aliases = std::move(aliases);
    // Heavy-tailed popularity.
    s.e.links_count = static_cast<std::uint64_t>(std::exp(rng.uniform(0.0, 9.0)));
    s.e.description = std::move(desc);
    s.type = t;
    s.lang = lang;
    w.entities.push_back(std::move(s));
    return w.entities.back();
  };

  // ENG places first; other descriptions refer to them.
  const char* towns[] = {"Marbury", "Elwin",   "Castor",  "Denholm", "Fairlow", "Greystone",
                         "Halden",  "Ivybridge", "Jarrow", "Kesford", "Lorton",  "Mayfield",
                         "Norbury", "Oakham",  "Penrith", "Quarry",  "Redmoor", "Selby",
                         "Tarland", "Upton",   "Varley",  "Westcott", "Yarrow", "Zennor",
                         "Ashby",   "Brindle", "Colwick", "Dunmore", "Easton",  "Frome"};
  std::vector<std::string> town_names(std::begin(towns), std::end(towns));
  for (const auto& t : town_names)
    add(t, EntityType::GPE, Language::ENG, {"Port " + t},
        "town known for " + std::string(kTopics[rng.below(10)]) + " and its harbour");
  for (size_t i = 0; i < 15; ++i)
    add(town_names[i] + " River", EntityType::LOC, Language::ENG, {},
        "river flowing through " + town_names[i] + " valley");
  for (size_t i = 0; i < 15; ++i)
    add(town_names[15 + i] + " Airport", EntityType::FAC, Language::ENG, {},
        "airport serving " + town_names[15 + i] + " region");

  const char* firsts[] = {"John", "Mary", "Peter", "Anna", "David", "Laura", "Mark", "Susan",
                          "Paul", "Helen"};
  const char* lasts[] = {"Smith", "Carter", "Nolan", "Reyes", "Walsh", "Brooks", "Hayes",
                         "Porter", "Quinn", "Fisher"};
  std::set<std::pair<size_t, size_t>> used;
  while (used.size() < 50) used.insert({rng.below(10), rng.below(10)});
  for (auto [f, l] : used) {
    const std::string name = std::string(firsts[f]) + " " + lasts[l];
    auto& s = add(name, EntityType::PER, Language::ENG,
                  {std::string(1, firsts[f][0]) + ". " + lasts[l]},
                  "politician from " + town_names[rng.below(30)] + " working on " +
                      kTopics[rng.below(10)]);
    s.surname = lasts[l];
  }

  const char* heads[] = {"Northwind", "Bluewater", "Redstone", "Silverline", "Greenfield",
                         "Ironbridge", "Goldcrest", "Whitehall"};
  const char* kinds[] = {"Shipping", "Mining", "Energy", "Textiles", "Software"};
  const char* kinds_es[] = {"Naviera", "Minera", "Energética", "Textil", "Informática"};
  for (size_t h = 0; h < 8; ++h)
    for (size_t k = 0; k < 5; ++k) {
      const std::string full = std::string(heads[h]) + " " + kinds[k] + " Company";
      auto& s = add(full, EntityType::ORG, Language::ENG,
                    {std::string(heads[h]) + " " + kinds[k]},
                    std::string(kinds[k]) + " company based in " + town_names[(h * 5 + k) % 30]);
      for (char& c : s.e.description) c = static_cast<char>(std::tolower(c));
      s.abbreviation = std::string(1, heads[h][0]) + kinds[k][0] + "C";
      s.spanish = std::string(kinds_es[k]) + " " + heads[h];
      w.abbreviations.push_back({s.abbreviation, full});
      w.translations.push_back({s.spanish, full});
    }

  // CMN: simplified canonical names, traditional forms through the variant
  // table, English names through the translation lexicon.
  const std::vector<std::pair<std::string, std::string>> zh_pairs = {
      {"东", "東"}, {"华", "華"}, {"银", "銀"}, {"龙", "龍"}, {"张", "張"}, {"陈", "陳"},
      {"刘", "劉"}, {"杨", "楊"}, {"电", "電"}, {"机", "機"}, {"场", "場"}, {"湾", "灣"},
      {"马", "馬"}, {"云", "雲"}, {"长", "長"}, {"门", "門"}, {"车", "車"}, {"桥", "橋"}};
  for (const auto& p : zh_pairs) w.variants.push_back(p);
  auto to_trad = [&](const std::string& s) {
    std::string out;
    for (char32_t c : text::decode(s)) {
      std::string ch = text::encode(std::u32string(1, c));
      for (const auto& [a, b] : zh_pairs)
        if (a == ch) ch = b;
      out += ch;
    }
    return out;
  };
  struct ZhSeed {
    const char* name;
    const char* english;
    EntityType type;
  };
  const ZhSeed zh[] = {
      {"王海龙", "Wang Hailong", EntityType::PER}, {"张云长", "Zhang Yunchang", EntityType::PER},
      {"陈金华", "Chen Jinhua", EntityType::PER},   {"刘东明", "Liu Dongming", EntityType::PER},
      {"杨马林", "Yang Malin", EntityType::PER},    {"李长江", "Li Changjiang", EntityType::PER},
      {"周云华", "Zhou Yunhua", EntityType::PER},   {"黄海", "Huang Hai", EntityType::PER},
      {"东华银行", "Donghua Bank", EntityType::ORG}, {"长江电车公司", "Changjiang Tram Company", EntityType::ORG},
      {"金山电机公司", "Jinshan Motor Company", EntityType::ORG},
      {"南湾银行", "Nanwan Bank", EntityType::ORG}, {"龙门车业", "Longmen Motors", EntityType::ORG},
      {"云桥集团", "Yunqiao Group", EntityType::ORG}, {"马山电力", "Mashan Power", EntityType::ORG},
      {"南江", "Nanjiang", EntityType::GPE},       {"金山", "Jinshan", EntityType::GPE},
      {"龙门", "Longmen", EntityType::GPE},        {"东湾", "Dongwan", EntityType::GPE},
      {"云州", "Yunzhou", EntityType::GPE},         {"南江机场", "Nanjiang Airport", EntityType::FAC},
      {"金山机场", "Jinshan Airport", EntityType::FAC}, {"龙门长桥", "Longmen Bridge", EntityType::FAC},
      {"长湾河", "Changwan River", EntityType::LOC}, {"云山", "Yun Mountain", EntityType::LOC}};
  for (const auto& z : zh) {
    auto& s = add(z.name, z.type, Language::CMN, {},
                  std::string(z.english) + " " + kTopics[rng.below(10)] + " 南江 金山");
    s.e.english_name = z.english;
    s.traditional = to_trad(z.name);
    w.translations.push_back({z.name, z.english});
  }

  // SPA entities.
  const char* es_first[] = {"Carlos", "Lucía", "Jorge", "Elena", "Miguel"};
  const char* es_last[] = {"Ruiz", "Moreno", "Castillo", "Vega", "Navarro"};
  for (size_t i = 0; i < 10; ++i) {
    const std::string name = std::string(es_first[i % 5]) + " " + es_last[(i * 3 + i / 5) % 5];
    auto& s = add(name, EntityType::PER, Language::SPA, {}, "político de Villa " + town_names[i]);
    s.surname = es_last[(i * 3 + i / 5) % 5];
  }
  const char* es_orgs[][2] = {{"Banco del Norte", "North Bank"},
                              {"Compañía Minera del Sur", "Southern Mining Company"},
                              {"Aerolíneas del Valle", "Valley Airlines"},
                              {"Grupo Solana", "Solana Group"},
                              {"Editorial Faro", "Lighthouse Publishing"}};
  for (const auto& o : es_orgs) {
    auto& s = add(o[0], EntityType::ORG, Language::SPA, {}, std::string("empresa ") + o[1]);
    s.e.english_name = o[1];
    w.translations.push_back({o[0], o[1]});
  }
  const char* es_places[] = {"Villa Rosales", "San Telmo", "Puerto Alba", "Río Claro",
                             "Santa Inés", "Monte Verde", "Las Palmas", "Valle Hondo"};
  for (size_t i = 0; i < 8; ++i)
    add(es_places[i], i < 6 ? EntityType::GPE : EntityType::LOC, Language::SPA, {},
        std::string("ciudad de ") + es_places[i]);
  add("Estación Central", EntityType::FAC, Language::SPA, {}, "estación de tren");
  add("Puente Alba", EntityType::FAC, Language::SPA, {}, "puente en Puerto Alba");

  if (w.entities.size() != 200) throw std::runtime_error("KB must hold 200 entities");
  return w;
}

void write_kb(const fs::path& dir, const World& w) {
  fs::create_directories(dir);
  std::ofstream ents(dir / "entities.tsv", std::ios::binary | std::ios::trunc);
  for (const auto& s : w.entities) kb::write_entity(ents, s.e);
  auto pairs = [&](const char* file, const auto& list) {
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    for (const auto& [a, b] : list) out << text::escape_field(a) << '\t' << text::escape_field(b) << '\n';
  };
  pairs("abbreviations.tsv", w.abbreviations);
  pairs("zh_variants.tsv", w.variants);
  pairs("translations.tsv", w.translations);
}

// ---------------------------------------------------------------------------
// Linking corpus

struct Picker {
  const World& w;
  Rng& rng;
  const SynthEntity& of(Language lang, EntityType t) {
    std::vector<const SynthEntity*> pool;
    for (const auto& s : w.entities)
      if (s.lang == lang && s.type == t) pool.push_back(&s);
    return *pool[rng.below(pool.size())];
  }
  const SynthEntity& org_with_abbreviation() {
    std::vector<const SynthEntity*> pool;
    for (const auto& s : w.entities)
      if (!s.abbreviation.empty()) pool.push_back(&s);
    return *pool[rng.below(pool.size())];
  }
};

LinkTarget kb_target(const SynthEntity& s) { return LinkTarget::kb(s.e.kb_id); }

// Names absent from the KB, linked to NIL.
const char* kNilEng[] = {"Oscar Lindqvist", "Tomas Halvorsen", "Ingrid Falk", "Harlow Mills"};
const char* kNilSpa[] = {"Ramón Ibarra", "Pilar Ocaña"};
const char* kNilCmn[] = {"孙立平", "郭晓明"};

void eng_sentence(DocBuilder& b, Picker& pick, size_t kind) {
  using ET = EntityType;
  switch (kind % 7) {
    case 0: {
      const auto& p = pick.of(Language::ENG, ET::PER);
      const auto& o = pick.of(Language::ENG, ET::ORG);
      const auto& g = pick.of(Language::ENG, ET::GPE);
      b.mention(p.e.canonical_name, ET::PER, MentionKind::NAM, kb_target(p));
      b.word("met managers of");
      b.mention(o.e.canonical_name, ET::ORG, MentionKind::NAM, kb_target(o));
      b.word("in");
      b.mention(g.e.canonical_name, ET::GPE, MentionKind::NAM, kb_target(g));
      b.end_sentence(".");
      break;
    }
    case 1: {  // surname after the full name
      const auto& p = pick.of(Language::ENG, ET::PER);
      b.mention(p.e.canonical_name, ET::PER, MentionKind::NAM, kb_target(p));
      b.word("arrived on Monday and");
      b.mention(p.surname, ET::PER, MentionKind::NAM, kb_target(p));
      b.word("spoke to reporters");
      b.end_sentence(".");
      break;
    }
    case 2: {  // abbreviation
      const auto& o = pick.org_with_abbreviation();
      b.word("Shares of");
      b.mention(o.abbreviation, ET::ORG, MentionKind::NAM, kb_target(o));
      b.word("rose after a deal on");
      b.word(kTopics[pick.rng.below(10)]);
      b.end_sentence(".");
      break;
    }
    case 3: {  // nominal right after its name
      const auto& p = pick.of(Language::ENG, ET::PER);
      b.mention(p.e.canonical_name, ET::PER, MentionKind::NAM, kb_target(p));
      b.raw(" ,");
      b.word("the");
      b.mention("minister", ET::PER, MentionKind::NOM, kb_target(p));
      b.raw(" ,");
      b.word("left early on Friday");
      b.end_sentence(".");
      break;
    }
    case 4: {
      const auto& f = pick.of(Language::ENG, ET::FAC);
      const auto& l = pick.of(Language::ENG, ET::LOC);
      b.word("Flights from");
      b.mention(f.e.canonical_name, ET::FAC, MentionKind::NAM, kb_target(f));
      b.word("crossed the");
      b.mention(l.e.canonical_name, ET::LOC, MentionKind::NAM, kb_target(l));
      b.end_sentence(".");
      break;
    }
    case 5: {  // a name the KB does not know
      b.mention(kNilEng[pick.rng.below(4)], ET::PER, MentionKind::NAM, LinkTarget::nil());
      b.word("praised the harbour");
      b.end_sentence(".");
      break;
    }
    default: {
      const auto& o = pick.of(Language::ENG, ET::ORG);
      b.mention(o.e.aliases.front(), ET::ORG, MentionKind::NAM, kb_target(o));
      b.word("expanded into");
      b.mention("Port " + pick.of(Language::ENG, ET::GPE).e.canonical_name, ET::GPE,
                MentionKind::NAM, LinkTarget::nil());
      // The alias lookup resolves "Port X" to the town.
      const auto& town = *std::find_if(pick.w.entities.begin(), pick.w.entities.end(),
                                       [&](const SynthEntity& s) {
                                         return "Port " + s.e.canonical_name ==
                                                b.gold.back().mention.surface;
                                       });
      b.gold.back().target = kb_target(town);
      b.end_sentence(".");
      break;
    }
  }
}

void spa_sentence(DocBuilder& b, Picker& pick, size_t kind) {
  using ET = EntityType;
  switch (kind % 5) {
    case 0: {
      const auto& p = pick.of(Language::SPA, ET::PER);
      const auto& g = pick.of(Language::SPA, ET::GPE);
      b.mention(p.e.canonical_name, ET::PER, MentionKind::NAM, kb_target(p));
      b.word("visitó");
      b.mention(g.e.canonical_name, ET::GPE, MentionKind::NAM, kb_target(g));
      b.word("el lunes");
      b.end_sentence(".");
      break;
    }
    case 1: {  // Spanish rendering of an English organization
      const auto& o = pick.org_with_abbreviation();
      b.word("La empresa");
      b.mention(o.spanish, ET::ORG, MentionKind::NAM, kb_target(o));
      b.word("abrió una oficina");
      b.end_sentence(".");
      break;
    }
    case 2: {
      const auto& p = pick.of(Language::SPA, ET::PER);
      b.mention(p.e.canonical_name, ET::PER, MentionKind::NAM, kb_target(p));
      b.word("llegó y");
      b.mention(p.surname, ET::PER, MentionKind::NAM, kb_target(p));
      b.word("habló con la prensa");
      b.end_sentence(".");
      break;
    }
    case 3: {
      const auto& o = pick.of(Language::SPA, ET::ORG);
      b.mention(o.e.canonical_name, ET::ORG, MentionKind::NAM, kb_target(o));
      b.word("contrató a");
      b.mention(kNilSpa[pick.rng.below(2)], ET::PER, MentionKind::NAM, LinkTarget::nil());
      b.end_sentence(".");
      break;
    }
    default: {
      const auto& f = pick.of(Language::SPA, ET::FAC);
      b.word("Obras en");
      b.mention(f.e.canonical_name, ET::FAC, MentionKind::NAM, kb_target(f));
      b.end_sentence(".");
      break;
    }
  }
}

void cmn_sentence(DocBuilder& b, Picker& pick, size_t kind) {
  using ET = EntityType;
  auto surface = [&](const SynthEntity& s) {
    return pick.rng.uniform() < 0.4 ? s.traditional : s.e.canonical_name;
  };
  switch (kind % 4) {
    case 0: {
      const auto& p = pick.of(Language::CMN, ET::PER);
      const auto& g = pick.of(Language::CMN, ET::GPE);
      b.mention(surface(p), ET::PER, MentionKind::NAM, kb_target(p));
      b.raw("访问了");
      b.mention(surface(g), ET::GPE, MentionKind::NAM, kb_target(g));
      b.end_sentence("。");
      break;
    }
    case 1: {
      const auto& o = pick.of(Language::CMN, ET::ORG);
      b.mention(surface(o), ET::ORG, MentionKind::NAM, kb_target(o));
      b.raw("宣布扩大");
      b.raw(pick.rng.uniform() < 0.5 ? "业务" : "投资");
      b.end_sentence("。");
      break;
    }
    case 2: {
      const auto& f = pick.of(Language::CMN, ET::FAC);
      const auto& l = pick.of(Language::CMN, ET::LOC);
      b.mention(surface(f), ET::FAC, MentionKind::NAM, kb_target(f));
      b.raw("靠近");
      b.mention(surface(l), ET::LOC, MentionKind::NAM, kb_target(l));
      b.end_sentence("。");
      break;
    }
    default: {
      b.mention(kNilCmn[pick.rng.below(2)], ET::PER, MentionKind::NAM, LinkTarget::nil());
      b.raw("表示支持");
      b.end_sentence("。");
      break;
    }
  }
}

// Documents with `sentences` sentences each; NIL targets get corpus-level
// cluster ids by surface.
void linking_corpus(const World& w, std::uint64_t seed, size_t per_language, size_t sentences,
                    const std::string& prefix, std::vector<Document>& docs,
                    std::vector<LinkedMention>& gold) {
  Rng rng(seed);
  Picker pick{w, rng};
  for (Language lang : {Language::ENG, Language::SPA, Language::CMN}) {
    for (size_t d = 0; d < per_language; ++d) {
      DocBuilder b;
      b.spaced = lang != Language::CMN;
      b.doc = {prefix + to_string(lang) + "_" + std::to_string(d), "",
               d % 3 == 2 ? Category::DiscussionForum : Category::NewsReport, lang};
      for (size_t s = 0; s < sentences; ++s) {
        const size_t kind = rng.below(7);
        if (lang == Language::ENG) eng_sentence(b, pick, kind);
        else if (lang == Language::SPA) spa_sentence(b, pick, kind);
        else cmn_sentence(b, pick, kind);
      }
      docs.push_back(b.doc);
      gold.insert(gold.end(), b.gold.begin(), b.gold.end());
    }
  }
  std::map<std::string, std::string> nil_ids;
  for (auto& g : gold) {
    if (!g.target.is_nil()) continue;
    auto [it, fresh] = nil_ids.try_emplace(text::normalize(g.mention.surface), "");
    if (fresh) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "NIL%04zu", nil_ids.size());
      it->second = buf;
    }
    g.target.id = it->second;
  }
}

void write_corpus(const fs::path& dir, const std::vector<Document>& docs,
                  const std::vector<LinkedMention>& gold) {
  fs::create_directories(dir);
  write_docs((dir / "docs.tsv").string(), docs);
  write_gold((dir / "gold.tsv").string(), gold);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic data for the EDL pipeline"};
  std::string out_dir = "data";
  std::uint64_t seed = 2016;
  app.add_option("-o,--output", out_dir, "output directory");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const fs::path root(out_dir);
    overfit_corpus(root / "overfit", seed);
    const World w = build_world(seed + 1);
    write_kb(root / "kb", w);
    std::vector<Document> docs;
    std::vector<LinkedMention> gold;
    linking_corpus(w, seed + 2, 20, 5, "el_", docs, gold);
    write_corpus(root / "el", docs, gold);
    docs.clear();
    gold.clear();
    linking_corpus(w, seed + 3, 3, 4, "mini_", docs, gold);
    write_corpus(root / "mini", docs, gold);
  } catch (const std::exception& e) {
    std::cerr << "error code=Internal msg=" << e.what() << '\n';
    return 1;
  }
  return 0;
}
