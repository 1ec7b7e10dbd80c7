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

#ifndef EDL_PIPELINE_HPP_
#define EDL_PIPELINE_HPP_

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "edl/corpus.hpp"
#include "edl/el/candidates.hpp"
#include "edl/el/features.hpp"
#include "edl/el/queries.hpp"
#include "edl/el/ranker.hpp"
#include "edl/evaluation.hpp"
#include "edl/kb/knowledge_base.hpp"
#include "edl/md/detector.hpp"
#include "edl/md/models.hpp"
#include "edl/md/train.hpp"
#include "edl/nil_clustering.hpp"

namespace edl::pipeline {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config: `key = value` lines, '#' starts a comment. Relative paths resolve
// against the config file's directory.

struct PipelineConfig {
  std::vector<Language> languages{kAllLanguages.begin(), kAllLanguages.end()};
  std::vector<md::ModelKind> models{md::ModelKind::CRNNLM, md::ModelKind::Seq2Seq};
  md::TaggerConfig tagger;
  el::RankerConfig ranker;
  el::CandidateConfig candidates;
  size_t md_members = 5;
  bool spanish_nominal_mask = true;
  std::uint64_t seed = 1;
  size_t workers = 1;
  std::string system_id = "EDL";

  // Paths.
  std::string kb;
  std::string abbreviations, zh_variants, translations;
  std::string index;
  std::string md_docs, md_gold;
  std::string el_docs, el_gold;
  std::string run_docs;
  std::string checkpoints;
  std::string output;

  std::map<std::string, std::string> raw;  // everything as read, after overrides

  void validate() const {
    tagger.validate();
    ranker.validate();
    if (candidates.top_n_eng < 1 || candidates.top_n_spa < 1 || candidates.top_n_cmn < 1)
      throw Error(ErrorCode::InvalidConfig, "top_n must be >= 1");
    if (md_members < 1) throw Error(ErrorCode::InvalidConfig, "md.members must be >= 1");
    if (workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
    if (models.empty()) throw Error(ErrorCode::InvalidConfig, "no model kinds");
  }

  // FNV-1a over the sorted key=value pairs.
  std::uint64_t hash() const {
    std::string s;
    for (const auto& [k, v] : raw) s += k + "=" + v + "\n";
    return fnv1a64(s);
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
  return std::string(s.substr(a, b - a));
}

inline size_t to_size(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<size_t>(n);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad value for " + key + ": " + v);
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw Error(ErrorCode::InvalidConfig, "bad value for " + key + ": " + v);
}

}  // namespace detail

inline std::map<std::string, std::string> parse_key_values(std::istream& in,
                                                           const std::string& name) {
  std::map<std::string, std::string> kv;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line(text::strip_cr(raw));
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::InvalidConfig,
                  name + ":" + std::to_string(line_no) + ": expected key = value");
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

// Builds a config from key/value pairs. `base_dir` anchors relative paths.
inline PipelineConfig make_config(std::map<std::string, std::string> kv,
                                  const fs::path& base_dir = {}) {
  static const char* kKnown[] = {
      "languages", "models", "md.members", "spanish_nominal_mask", "seed", "workers",
      "system_id", "top_n.ENG", "top_n.SPA", "top_n.CMN", "kb", "aux.abbreviations",
      "aux.zh_variants", "aux.translations", "index", "md.docs", "md.gold", "el.docs",
      "el.gold", "run.docs", "checkpoints", "output"};
  for (const auto& [k, _] : kv) {
    const bool known = std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* s) {
                         return k == s;
                       }) != std::end(kKnown);
    if (!known && k.rfind("tagger.", 0) != 0 && k.rfind("ranker.", 0) != 0)
      throw Error(ErrorCode::InvalidConfig, "unknown config key '" + k + "'");
  }

  PipelineConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("seed")) c.seed = detail::to_size("seed", *v);
  // The pipeline seed is the default for both model families.
  c.tagger.seed = c.seed;
  c.ranker.seed = c.seed;
  c.tagger.apply(kv, "tagger.");
  c.ranker.apply(kv, "ranker.");
  if (auto* v = get("languages")) {
    c.languages.clear();
    for (const auto& s : text::split(*v, ',')) {
      auto l = parse_language(detail::trim(s));
      if (!l) throw Error(ErrorCode::InvalidConfig, "unknown language '" + s + "'");
      c.languages.push_back(*l);
    }
  }
  if (auto* v = get("models")) {
    c.models.clear();
    for (const auto& s : text::split(*v, ','))
      c.models.push_back(md::parse_model_kind(detail::trim(s)));
  }
  if (auto* v = get("md.members")) c.md_members = detail::to_size("md.members", *v);
  if (auto* v = get("spanish_nominal_mask"))
    c.spanish_nominal_mask = detail::to_bool("spanish_nominal_mask", *v);
  if (auto* v = get("workers")) c.workers = detail::to_size("workers", *v);
  if (auto* v = get("system_id")) c.system_id = *v;
  if (auto* v = get("top_n.ENG")) c.candidates.top_n_eng = detail::to_size("top_n.ENG", *v);
  if (auto* v = get("top_n.SPA")) c.candidates.top_n_spa = detail::to_size("top_n.SPA", *v);
  if (auto* v = get("top_n.CMN")) c.candidates.top_n_cmn = detail::to_size("top_n.CMN", *v);

  auto path = [&](const char* key, std::string& field) {
    if (auto* v = get(key); v && !v->empty()) {
      fs::path p(*v);
      field = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).lexically_normal().string();
    }
  };
  path("kb", c.kb);
  path("aux.abbreviations", c.abbreviations);
  path("aux.zh_variants", c.zh_variants);
  path("aux.translations", c.translations);
  path("index", c.index);
  path("md.docs", c.md_docs);
  path("md.gold", c.md_gold);
  path("el.docs", c.el_docs);
  path("el.gold", c.el_gold);
  path("run.docs", c.run_docs);
  path("checkpoints", c.checkpoints);
  path("output", c.output);
  c.raw = std::move(kv);
  c.validate();
  return c;
}

// Reads a config file, then applies `overrides` (same key = value syntax).
inline PipelineConfig load_config(const std::string& path,
                                  const std::map<std::string, std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  auto kv = parse_key_values(in, path);
  for (const auto& [k, v] : overrides) kv[k] = v;
  return make_config(std::move(kv), fs::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Artifacts

inline std::string require(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::InvalidConfig, std::string("no path for ") + what);
  if (!fs::exists(path))
    throw Error(ErrorCode::MissingArtifact, std::string(what) + " not found: " + path);
  return path;
}

inline std::string md_checkpoint_path(const PipelineConfig& c, md::ModelKind kind, size_t i) {
  return (fs::path(c.checkpoints) / ("md_" + std::string(md::to_string(kind)) + "_" +
                                     std::to_string(i) + ".ckpt"))
      .string();
}

inline std::string ranker_checkpoint_path(const PipelineConfig& c, size_t i) {
  return (fs::path(c.checkpoints) / ("ranker_" + std::to_string(i) + ".ckpt")).string();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Manifest next to an artifact: config hash and content hash.
inline void write_manifest(const std::string& artifact, const PipelineConfig& c,
                           const std::map<std::string, std::string>& extra = {}) {
  std::ostringstream m;
  m << "artifact\t" << fs::path(artifact).filename().string() << '\n'
    << "config_hash\t" << hex64(c.hash()) << '\n'
    << "content_hash\t" << hex64(fnv1a64(read_text_file(artifact))) << '\n';
  for (const auto& [k, v] : extra) m << k << '\t' << v << '\n';
  write_text_file(artifact + ".manifest", m.str());
}

inline std::vector<Document> filter_languages(std::vector<Document> docs,
                                              const PipelineConfig& c) {
  std::erase_if(docs, [&](const Document& d) {
    return std::find(c.languages.begin(), c.languages.end(), d.language) == c.languages.end();
  });
  return docs;
}

// ---------------------------------------------------------------------------
// kb-index

inline kb::KnowledgeBase build_kb(const PipelineConfig& c) {
  kb::AuxTables aux;
  if (!c.abbreviations.empty())
    kb::load_aux(require(c.abbreviations, "abbreviation table"), kb::AuxKind::Abbreviations, aux);
  if (!c.zh_variants.empty())
    kb::load_aux(require(c.zh_variants, "variant table"), kb::AuxKind::ZhVariants, aux);
  if (!c.translations.empty())
    kb::load_aux(require(c.translations, "translation lexicon"), kb::AuxKind::Translations, aux);
  return kb::KnowledgeBase(kb::load_entities(require(c.kb, "KB snapshot")), std::move(aux));
}

inline size_t cmd_kb_index(const PipelineConfig& c) {
  auto kb = build_kb(c);
  if (c.index.empty()) throw Error(ErrorCode::InvalidConfig, "no path for index");
  std::ostringstream out;
  kb::write_index(out, kb);
  write_text_file(c.index, out.str());
  write_manifest(c.index, c, {{"entities", std::to_string(kb.size())}});
  return kb.size();
}

inline kb::KnowledgeBase load_kb_index(const PipelineConfig& c) {
  std::ifstream in(require(c.index, "KB index"), std::ios::binary);
  return kb::read_index(in, c.index);
}

// ---------------------------------------------------------------------------
// train-md

// Splits [0, n) into `k` folds after a seeded shuffle; fold sizes differ by
// at most one.
inline std::vector<std::vector<size_t>> folds(size_t n, size_t k, std::uint64_t seed) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<size_t>> out(k);
  for (size_t i = 0; i < n; ++i) out[i * k / n].push_back(order[i]);
  return out;
}

struct MdTrainReport {
  md::ModelKind kind;
  size_t member = 0;
  size_t train_sentences = 0;
  size_t dev_sentences = 0;
  size_t epochs = 0;
  double best_dev_loss = 0;
  std::string path;
};

inline std::vector<md::Example> to_examples(const std::vector<md::TokenizedSentence>& sents,
                                            const md::Vocab& vocab) {
  std::vector<md::Example> out;
  for (const auto& s : sents) {
    md::Example ex;
    for (const auto& t : s.tokens) ex.ids.push_back(vocab.id(t.surface));
    ex.spans = s.spans;
    out.push_back(std::move(ex));
  }
  return out;
}

inline md::Vocab build_md_vocab(const std::vector<md::TokenizedSentence>& sents) {
  std::vector<std::vector<Token>> tokens;
  for (const auto& s : sents) tokens.push_back(s.tokens);
  return md::build_vocab(tokens);
}

// Trains `md_members` models per kind; member i holds out fold i for early
// stopping and trains on the other folds.
inline std::vector<MdTrainReport> cmd_train_md(const PipelineConfig& c) {
  auto docs = filter_languages(load_documents(require(c.md_docs, "MD training documents")), c);
  auto gold = load_gold(require(c.md_gold, "MD training annotations"));
  std::vector<Mention> mentions;
  for (const auto& g : gold) mentions.push_back(g.mention);
  auto sents = md::annotated_sentences(docs, mentions);
  if (sents.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training sentences");
  const md::Vocab vocab = build_md_vocab(sents);
  const auto examples = to_examples(sents, vocab);
  const size_t k = c.md_members;
  const auto split = folds(examples.size(), k, c.tagger.seed);
  fs::create_directories(c.checkpoints);

  std::vector<MdTrainReport> reports;
  for (md::ModelKind kind : c.models) {
    for (size_t m = 0; m < k; ++m) {
      std::vector<md::Example> train, dev;
      for (size_t f = 0; f < k; ++f)
        for (size_t i : split[f]) (f == m && k > 1 ? dev : train).push_back(examples[i]);
      if (train.empty()) train = dev;
      md::TaggerConfig cfg = c.tagger;
      cfg.seed = c.tagger.seed + 1000 * (m + 1);
      auto r = md::train(kind, md::init_model(kind, cfg, vocab.size(), cfg.seed), train, dev, cfg);
      md::TaggerModel model{kind, cfg, vocab, std::move(r.best)};
      MdTrainReport rep{kind, m, train.size(), dev.size(), r.epochs_run, 0.0,
                        md_checkpoint_path(c, kind, m)};
      if (!r.dev_loss.empty() && r.best_epoch >= 1) rep.best_dev_loss = r.dev_loss[r.best_epoch - 1];
      nn::save_checkpoint(rep.path, model.to_checkpoint(c.hash()));
      write_manifest(rep.path, c);
      reports.push_back(rep);
    }
  }
  return reports;
}

inline std::map<md::ModelKind, std::vector<md::TaggerModel>> load_taggers(const PipelineConfig& c) {
  std::map<md::ModelKind, std::vector<md::TaggerModel>> out;
  for (md::ModelKind kind : c.models)
    for (size_t m = 0; m < c.md_members; ++m)
      out[kind].push_back(md::TaggerModel::from_checkpoint(
          nn::load_checkpoint(require(md_checkpoint_path(c, kind, m), "MD checkpoint"))));
  return out;
}

// ---------------------------------------------------------------------------
// train-el

inline std::map<std::string, std::vector<Mention>> mentions_by_doc(
    const std::vector<LinkedMention>& links) {
  std::map<std::string, std::vector<Mention>> out;
  for (const auto& l : links) out[l.mention.doc_id].push_back(l.mention);
  for (auto& [_, v] : out) std::sort(v.begin(), v.end(), mention_less);
  return out;
}

// Candidate lists and features for every gold mention, with the gold index
// where the gold target made it into the list.
inline std::vector<el::LinkingInstance> linking_instances(
    const std::vector<Document>& docs, const std::vector<GoldLink>& gold,
    const kb::KnowledgeBase& kb, const el::CandidateConfig& cfg) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id[d.doc_id] = &d;
  const auto doc_mentions = mentions_by_doc(gold);
  std::vector<el::LinkingInstance> out;
  for (const auto& g : gold) {
    auto it = by_id.find(g.mention.doc_id);
    if (it == by_id.end()) continue;
    const Document& doc = *it->second;
    auto list = el::generate_candidates(g.mention, doc, doc_mentions.at(doc.doc_id), kb, cfg);
    el::LinkingInstance inst;
    inst.candidates = el::extract_features(g.mention, doc, list, kb);
    LinkTarget target = g.target.is_nil() ? LinkTarget::nil() : g.target;
    inst.gold = list.index_of(target);
    out.push_back(std::move(inst));
  }
  return out;
}

struct ElTrainReport {
  size_t instances = 0;
  size_t skipped = 0;
  std::vector<std::string> paths;
};

inline ElTrainReport cmd_train_el(const PipelineConfig& c) {
  auto kb = load_kb_index(c);
  auto docs = filter_languages(load_documents(require(c.el_docs, "EL training documents")), c);
  auto gold = load_gold(require(c.el_gold, "EL training annotations"));
  auto data = linking_instances(docs, gold, kb, c.candidates);
  auto ens = el::train_ranker(data, c.ranker);
  fs::create_directories(c.checkpoints);
  ElTrainReport rep;
  rep.instances = data.size();
  rep.skipped = ens.skipped;
  for (size_t i = 0; i < ens.members.size(); ++i) {
    const std::string path = ranker_checkpoint_path(c, i);
    nn::save_checkpoint(path, ens.members[i].to_checkpoint(c.hash()));
    write_manifest(path, c);
    rep.paths.push_back(path);
  }
  return rep;
}

inline std::vector<el::RankerModel> load_rankers(const PipelineConfig& c) {
  std::vector<el::RankerModel> out;
  for (size_t i = 0; i < c.ranker.members; ++i)
    out.push_back(el::RankerModel::from_checkpoint(
        nn::load_checkpoint(require(ranker_checkpoint_path(c, i), "ranker checkpoint"))));
  return out;
}

// ---------------------------------------------------------------------------
// run

// Per-mention trace for the diagnostics stream.
struct MentionTrace {
  Mention mention;
  std::vector<std::string> queries;
  std::vector<std::string> candidates;  // kb ids, "NIL" last
  std::vector<double> result1_scores;   // per candidate, 0 when not in Result1
  std::vector<double> posterior;
  size_t chosen = 0;
};

struct Artifacts {
  kb::KnowledgeBase kb;
  std::map<md::ModelKind, std::vector<md::TaggerModel>> taggers;
  std::vector<el::RankerModel> rankers;

  static Artifacts load(const PipelineConfig& c) {
    return {load_kb_index(c), load_taggers(c), load_rankers(c)};
  }
};

// Mention detection, candidates and ranking for one document. NIL clusters
// are assigned later over the whole corpus.
inline std::vector<MentionTrace> process_document(const Document& doc, const Artifacts& a,
                                                  const PipelineConfig& c) {
  md::DecodeOptions opts;
  opts.beam_width = c.tagger.beam_width;
  opts.mask_nominal = c.spanish_nominal_mask && doc.language == Language::SPA;
  std::vector<std::vector<Mention>> systems;
  for (md::ModelKind kind : c.models) {
    std::vector<const md::TaggerModel*> members;
    for (const auto& m : a.taggers.at(kind)) members.push_back(&m);
    systems.push_back(md::detect_mentions(members, doc, opts));
  }
  std::vector<Mention> mentions = systems[0];
  for (size_t i = 1; i < systems.size(); ++i) mentions = md::merge_systems(mentions, systems[i]);

  std::vector<const el::RankerModel*> rankers;
  for (const auto& r : a.rankers) rankers.push_back(&r);
  std::vector<MentionTrace> out;
  for (const auto& m : mentions) {
    auto list = el::generate_candidates(m, doc, mentions, a.kb, c.candidates);
    auto feats = el::extract_features(m, doc, list, a.kb);
    auto d = el::link(rankers, feats);
    MentionTrace t;
    t.mention = m;
    t.queries = list.queries;
    for (const auto& cand : list.items) {
      t.candidates.push_back(el::to_string(cand));
      auto it = cand.nil ? list.result1.end() : list.result1.find(cand.kb_id);
      t.result1_scores.push_back(it == list.result1.end() ? 0.0 : it->second);
    }
    t.posterior = d.posterior;
    t.chosen = d.index;
    out.push_back(std::move(t));
  }
  return out;
}

// Runs every document, `workers` at a time. Results land in document order,
// so the output does not depend on scheduling.
inline std::vector<MentionTrace> process_corpus(const std::vector<Document>& docs,
                                                const Artifacts& a, const PipelineConfig& c) {
  std::vector<std::vector<MentionTrace>> per_doc(docs.size());
  std::atomic<size_t> next{0};
  std::mutex err_mu;
  std::optional<Error> first_error;
  auto worker = [&] {
    for (size_t i = next++; i < docs.size(); i = next++) {
      try {
        per_doc[i] = process_document(docs[i], a, c);
      } catch (const Error& e) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = e;
      }
    }
  };
  const size_t n = std::min(c.workers, std::max<size_t>(docs.size(), 1));
  std::vector<std::thread> pool;
  for (size_t w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) throw *first_error;
  std::vector<MentionTrace> out;
  for (auto& v : per_doc)
    for (auto& t : v) out.push_back(std::move(t));
  return out;
}

inline std::vector<LinkedMention> link_decisions(const std::vector<MentionTrace>& traces) {
  std::vector<LinkedMention> links;
  for (const auto& t : traces) {
    LinkedMention lm;
    lm.mention = t.mention;
    const std::string& chosen = t.candidates[t.chosen];
    lm.target = t.chosen + 1 == t.candidates.size() ? LinkTarget::nil() : LinkTarget::kb(chosen);
    links.push_back(std::move(lm));
  }
  assign_nil_ids(links);
  return links;
}

inline std::vector<LinkedMention> run_links(const PipelineConfig& c, const Artifacts& a) {
  auto docs = filter_languages(load_documents(require(c.run_docs, "input documents")), c);
  return link_decisions(process_corpus(docs, a, c));
}

// Writes the submission TSV to `c.output` and returns the record count.
inline size_t cmd_run(const PipelineConfig& c) {
  if (c.output.empty()) throw Error(ErrorCode::InvalidConfig, "no path for output");
  auto a = Artifacts::load(c);
  auto links = run_links(c, a);
  std::ostringstream out;
  write_submission(out, links, c.system_id);
  write_text_file(c.output, out.str());
  write_manifest(c.output, c, {{"records", std::to_string(links.size())}});
  return links.size();
}

// One JSON object per detected mention.
inline void cmd_diag(const PipelineConfig& c, std::ostream& out) {
  auto a = Artifacts::load(c);
  auto docs = filter_languages(load_documents(require(c.run_docs, "input documents")), c);
  auto traces = process_corpus(docs, a, c);
  auto links = link_decisions(traces);
  std::map<decltype(mention_key(Mention{})), std::string> ids;
  for (const auto& l : links) ids[mention_key(l.mention)] = l.target.id;
  for (const auto& t : traces) {
    nlohmann::ordered_json j;
    j["doc_id"] = t.mention.doc_id;
    j["span"] = {t.mention.char_start, t.mention.char_end};
    j["surface"] = t.mention.surface;
    j["type"] = to_string(t.mention.entity_type);
    j["kind"] = to_string(t.mention.kind);
    j["confidence"] = t.mention.confidence;
    j["queries"] = t.queries;
    auto cands = nlohmann::ordered_json::array();
    for (size_t i = 0; i < t.candidates.size(); ++i)
      cands.push_back({{"id", t.candidates[i]},
                       {"result1", t.result1_scores[i]},
                       {"posterior", t.posterior[i]}});
    j["candidates"] = std::move(cands);
    j["link"] = ids.at(mention_key(t.mention));
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// eval

// Scores a submission against gold. Languages come from `docs_path` when
// given; otherwise only the ALL rows are produced.
inline std::vector<eval::ReportRow> cmd_eval(const std::string& system_path,
                                             const std::string& gold_path,
                                             const std::string& docs_path = {}) {
  auto system = load_gold(require(system_path, "system output"));
  auto gold = load_gold(require(gold_path, "gold annotations"));
  std::map<std::string, Language> langs;
  if (!docs_path.empty())
    for (const auto& d : load_documents(require(docs_path, "documents")))
      langs[d.doc_id] = d.language;
  return eval::evaluate(system, gold, langs);
}

}  // namespace edl::pipeline

#endif  // EDL_PIPELINE_HPP_
