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

#ifndef EDL_EL_RANKER_HPP_
#define EDL_EL_RANKER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edl/el/features.hpp"
#include "edl/md/config.hpp"
#include "edl/neural/adadelta.hpp"
#include "edl/neural/layers.hpp"
#include "edl/neural/tensor.hpp"
#include "edl/random.hpp"

namespace edl::el {

using nn::CSpan;
using nn::ParameterStore;
using nn::Tensor;
using nn::Vec;

// Desk-scale defaults; paper_scale() gives 512/256 hidden units.
struct RankerConfig {
  size_t word_dim = 100;
  size_t proj_dim = 10;
  size_t hidden1 = 32;
  size_t hidden2 = 16;
  size_t batch_size = 8;
  size_t max_epochs = 30;
  size_t patience = 5;
  size_t members = 5;
  double rho = 0.95;
  double epsilon = 1e-6;
  std::uint64_t seed = 1;

  static RankerConfig paper_scale() {
    RankerConfig c;
    c.hidden1 = 512;
    c.hidden2 = 256;
    return c;
  }

  size_t input_dim() const { return 2 * word_dim + 6 * proj_dim; }

  void validate() const {
    if (word_dim < 1 || proj_dim < 1 || hidden1 < 1 || hidden2 < 1 ||
        batch_size < 1 || members < 1)
      throw Error(ErrorCode::InvalidConfig, "ranker dimensions must be positive");
  }

  bool same_shape(const RankerConfig& o) const {
    return word_dim == o.word_dim && proj_dim == o.proj_dim &&
           hidden1 == o.hidden1 && hidden2 == o.hidden2;
  }

  std::map<std::string, std::string> to_map() const {
    return {{"word_dim", std::to_string(word_dim)},
            {"proj_dim", std::to_string(proj_dim)},
            {"hidden1", std::to_string(hidden1)},
            {"hidden2", std::to_string(hidden2)},
            {"batch_size", std::to_string(batch_size)},
            {"max_epochs", std::to_string(max_epochs)},
            {"patience", std::to_string(patience)},
            {"members", std::to_string(members)},
            {"seed", std::to_string(seed)}};
  }

  void apply(const std::map<std::string, std::string>& kv,
             const std::string& prefix = "") {
    auto get = [&](const char* key, auto& field) {
      auto it = kv.find(prefix + key);
      if (it == kv.end()) return;
      try {
        field = static_cast<std::remove_reference_t<decltype(field)>>(
            std::stoull(it->second));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig,
                    "bad value for " + prefix + key + ": " + it->second);
      }
    };
    get("word_dim", word_dim);
    get("proj_dim", proj_dim);
    get("hidden1", hidden1);
    get("hidden2", hidden2);
    get("batch_size", batch_size);
    get("max_epochs", max_epochs);
    get("patience", patience);
    get("members", members);
    get("seed", seed);
  }
};

// Projection matrices for the one-hot features: name, one-hot width.
struct Projection {
  const char* name;
  int width;
};
inline constexpr Projection kProjections[6] = {
    {"proj.type", kNumEntityTypes},   {"proj.category", kNumCategories},
    {"proj.hot", kFeatureBins},       {"proj.edit", kFeatureBins},
    {"proj.tfidf", kFeatureBins},     {"proj.translation", kFeatureBins}};

// Ranker input with words mapped to vocabulary ids.
struct EncodedCandidate {
  std::vector<int> mention_ids;
  std::vector<int> name_ids;
  bool nil = false;
  int onehot[6] = {0, 0, 0, 0, 0, 0};
};

inline EncodedCandidate encode_candidate(const md::Vocab& vocab, const RawFeatures& f) {
  EncodedCandidate e;
  for (const auto& w : f.mention_words) e.mention_ids.push_back(vocab.id(w));
  for (const auto& w : f.name_words) e.name_ids.push_back(vocab.id(w));
  e.nil = f.nil;
  const int vals[6] = {f.type, f.category, f.nil ? 0 : f.hot,
                       f.nil ? kFeatureBins - 1 : f.edit, f.nil ? 0 : f.tfidf,
                       f.nil ? kFeatureBins - 1 : f.translation};
  for (int k = 0; k < 6; ++k) {
    if (vals[k] < 0 || vals[k] >= kProjections[k].width)
      throw Error(ErrorCode::ShapeMismatch,
                  std::string("feature out of range for ") + kProjections[k].name);
    e.onehot[k] = vals[k];
  }
  return e;
}

inline ParameterStore init_ranker(const RankerConfig& cfg, size_t vocab_size,
                                  std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ParameterStore store;
  nn::add_embedding(store, "word.embed", vocab_size, cfg.word_dim, rng);
  nn::add_embedding(store, "nil.name", 1, cfg.word_dim, rng);
  for (const auto& p : kProjections)
    nn::init_glorot(store.add(p.name, {cfg.proj_dim, static_cast<size_t>(p.width)}).value,
                    static_cast<size_t>(p.width), cfg.proj_dim, rng);
  nn::add_dense(store, "h1", cfg.input_dim(), cfg.hidden1, rng);
  nn::add_dense(store, "h2", cfg.hidden1, cfg.hidden2, rng);
  nn::add_dense(store, "score", cfg.hidden2, 1, rng);
  return store;
}

namespace detail {

inline size_t clamp_word(int id, size_t rows) {
  return id < 0 || static_cast<size_t>(id) >= rows ? 0 : static_cast<size_t>(id);
}

}  // namespace detail

// e1 | e2 | e3..e8, 2 * word_dim + 6 * proj_dim values.
inline Vec feature_vector(const ParameterStore& store, const EncodedCandidate& c) {
  const Tensor& embed = store.at("word.embed").value;
  const size_t d = embed.dim(1);
  Vec x;
  x.reserve(2 * d + 60);
  Vec e1(d, 0.0), e2(d, 0.0);
  for (int id : c.mention_ids) nn::add_to(e1, embed.row(detail::clamp_word(id, embed.dim(0))));
  if (c.nil) {
    nn::add_to(e2, store.at("nil.name").value.row(0));
  } else {
    for (int id : c.name_ids) nn::add_to(e2, embed.row(detail::clamp_word(id, embed.dim(0))));
  }
  x.insert(x.end(), e1.begin(), e1.end());
  x.insert(x.end(), e2.begin(), e2.end());
  for (int k = 0; k < 6; ++k) {
    const Tensor& p = store.at(kProjections[k].name).value;
    for (size_t r = 0; r < p.dim(0); ++r)
      x.push_back(p(r, static_cast<size_t>(c.onehot[k])));
  }
  return x;
}

inline void feature_backward(ParameterStore& store, const EncodedCandidate& c, CSpan dx) {
  nn::Parameter& embed = store.at("word.embed");
  const size_t d = embed.value.dim(1);
  for (int id : c.mention_ids)
    nn::add_to(embed.grad.row(detail::clamp_word(id, embed.value.dim(0))), dx.subspan(0, d));
  if (c.nil) {
    nn::add_to(store.at("nil.name").grad.row(0), dx.subspan(d, d));
  } else {
    for (int id : c.name_ids)
      nn::add_to(embed.grad.row(detail::clamp_word(id, embed.value.dim(0))),
                 dx.subspan(d, d));
  }
  size_t off = 2 * d;
  for (int k = 0; k < 6; ++k) {
    nn::Parameter& p = store.at(kProjections[k].name);
    for (size_t r = 0; r < p.value.dim(0); ++r)
      p.grad(r, static_cast<size_t>(c.onehot[k])) += dx[off + r];
    off += p.value.dim(0);
  }
}

struct ScoreCache {
  Vec x, a1, a2;
};

inline double candidate_score(const ParameterStore& store, const EncodedCandidate& c,
                              ScoreCache* cache = nullptr) {
  Vec x = feature_vector(store, c);
  Vec a1 = nn::dense(store.at("h1.W").value, store.at("h1.b").value, x,
                     nn::Activation::Sigmoid);
  Vec a2 = nn::dense(store.at("h2.W").value, store.at("h2.b").value, a1,
                     nn::Activation::Sigmoid);
  Vec s = nn::dense(store.at("score.W").value, store.at("score.b").value, a2,
                    nn::Activation::Identity);
  if (cache) *cache = {std::move(x), std::move(a1), std::move(a2)};
  return s[0];
}

inline void score_backward(ParameterStore& store, const EncodedCandidate& c,
                           const ScoreCache& k, double ds) {
  Vec d_out = {ds};
  Vec d2 = nn::dense_backward(store.ref("score.W"), store.ref("score.b"), k.a2, {},
                              d_out, nn::Activation::Identity);
  Vec d1 = nn::dense_backward(store.ref("h2.W"), store.ref("h2.b"), k.a1, k.a2, d2,
                              nn::Activation::Sigmoid);
  Vec dx = nn::dense_backward(store.ref("h1.W"), store.ref("h1.b"), k.x, k.a1, d1,
                              nn::Activation::Sigmoid);
  feature_backward(store, c, dx);
}

struct RankerOutput {
  Vec scores;
  Vec posterior;
};

inline RankerOutput rank(const ParameterStore& store,
                         const std::vector<EncodedCandidate>& list) {
  if (list.empty()) throw Error(ErrorCode::EmptyList, "empty candidate list");
  RankerOutput out;
  for (const auto& c : list) out.scores.push_back(candidate_score(store, c));
  out.posterior = nn::softmax(out.scores);
  return out;
}

// Cross-entropy of the gold index; with `backward` the gradient is
// accumulated into the store.
inline double ranker_loss(ParameterStore& store, const std::vector<EncodedCandidate>& list,
                          size_t gold, bool backward) {
  if (list.empty()) throw Error(ErrorCode::EmptyList, "empty candidate list");
  if (gold >= list.size()) throw Error(ErrorCode::GoldNotInList, "gold index out of range");
  std::vector<ScoreCache> caches(list.size());
  Vec scores(list.size());
  const ParameterStore& cstore = store;
  for (size_t k = 0; k < list.size(); ++k)
    scores[k] = candidate_score(cstore, list[k], backward ? &caches[k] : nullptr);
  const double loss = nn::logsumexp(scores) - scores[gold];
  if (!backward) return loss;
  Vec p = nn::softmax(scores);
  for (size_t k = 0; k < list.size(); ++k)
    score_backward(store, list[k], caches[k], p[k] - (k == gold ? 1.0 : 0.0));
  return loss;
}

struct LinkExample {
  std::vector<EncodedCandidate> candidates;
  size_t gold = 0;
};

struct RankerTrainResult {
  ParameterStore best;
  std::vector<double> train_loss;  // per epoch, mean per mention
  std::vector<double> dev_loss;
  size_t best_epoch = 0;
  size_t epochs_run = 0;
};

inline double mean_ranker_loss(ParameterStore& store, const std::vector<LinkExample>& data) {
  if (data.empty()) return 0.0;
  double total = 0;
  for (const auto& ex : data) total += ranker_loss(store, ex.candidates, ex.gold, false);
  return total / static_cast<double>(data.size());
}

// Mini-batch AdaDelta on the cross-entropy of the gold candidate with early
// stopping on `dev` (the training set when empty).
inline RankerTrainResult train_ranker_params(ParameterStore initial,
                                             const std::vector<LinkExample>& train,
                                             const std::vector<LinkExample>& dev,
                                             const RankerConfig& cfg) {
  if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no linking examples");
  cfg.validate();
  const auto& held_out = dev.empty() ? train : dev;
  RankerTrainResult result;
  ParameterStore store = std::move(initial);
  nn::AdaDelta optimizer(cfg.rho, cfg.epsilon);
  Rng rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  double best = std::numeric_limits<double>::infinity();
  size_t since_best = 0;
  result.best = store;
  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      store.zero_grad();
      for (size_t k = start; k < end; ++k) {
        const auto& ex = train[order[k]];
        const double loss = ranker_loss(store, ex.candidates, ex.gold, true);
        if (!std::isfinite(loss))
          throw Error(ErrorCode::NonFiniteLoss, "ranker loss diverged");
        total += loss;
      }
      store.scale_grad(1.0 / static_cast<double>(end - start));
      optimizer.step(store);
    }
    store.zero_grad();
    result.train_loss.push_back(total / static_cast<double>(train.size()));
    const double dev_loss = mean_ranker_loss(store, held_out);
    result.dev_loss.push_back(dev_loss);
    result.epochs_run = epoch;
    if (dev_loss < best) {
      best = dev_loss;
      result.best = store;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  result.best.zero_grad();
  return result;
}

// A trained ranker with its word vocabulary.
struct RankerModel {
  RankerConfig config;
  md::Vocab vocab;
  ParameterStore params;

  std::vector<EncodedCandidate> encode(const std::vector<RawFeatures>& list) const {
    std::vector<EncodedCandidate> out;
    out.reserve(list.size());
    for (const auto& f : list) out.push_back(encode_candidate(vocab, f));
    return out;
  }

  nn::Checkpoint to_checkpoint(std::uint64_t config_hash) const {
    nn::Checkpoint ck;
    ck.config_hash = config_hash;
    ck.seed = config.seed;
    ck.meta["kind"] = "ranker";
    ck.meta["vocab"] = vocab.serialize();
    for (const auto& [k, v] : config.to_map()) ck.meta["config." + k] = v;
    ck.params = params;
    return ck;
  }

  static RankerModel from_checkpoint(const nn::Checkpoint& ck) {
    auto kind = ck.meta.find("kind");
    if (kind == ck.meta.end() || kind->second != "ranker")
      throw Error(ErrorCode::MalformedInput, "not a ranker checkpoint");
    RankerModel m;
    std::map<std::string, std::string> cfg;
    for (const auto& [k, v] : ck.meta)
      if (k.rfind("config.", 0) == 0) cfg[k.substr(7)] = v;
    m.config.apply(cfg);
    auto vocab = ck.meta.find("vocab");
    m.vocab = md::Vocab::deserialize(vocab == ck.meta.end() ? "" : vocab->second);
    m.params = ck.params;
    return m;
  }
};

// One training mention: its candidate features and the gold position, if the
// gold target made it into the list.
struct LinkingInstance {
  std::vector<RawFeatures> candidates;
  std::optional<size_t> gold;
};

inline md::Vocab build_ranker_vocab(const std::vector<LinkingInstance>& data) {
  md::Vocab v;
  for (const auto& inst : data)
    for (const auto& f : inst.candidates) {
      for (const auto& w : f.mention_words) v.add(w);
      for (const auto& w : f.name_words) v.add(w);
    }
  return v;
}

struct RankerEnsemble {
  std::vector<RankerModel> members;
  size_t skipped = 0;  // instances whose gold was not in the list
};

// Trains `cfg.members` rankers; member i holds out fold i of an even split
// for early stopping and trains on the rest. One member trains on all data.
inline RankerEnsemble train_ranker(const std::vector<LinkingInstance>& data,
                                   const RankerConfig& cfg) {
  cfg.validate();
  RankerEnsemble out;
  std::vector<const LinkingInstance*> usable;
  for (const auto& inst : data) {
    if (inst.gold && *inst.gold < inst.candidates.size()) usable.push_back(&inst);
    else ++out.skipped;
  }
  if (usable.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no usable linking examples");
  md::Vocab vocab = build_ranker_vocab(data);
  std::vector<LinkExample> examples;
  for (const auto* inst : usable) {
    LinkExample ex;
    for (const auto& f : inst->candidates) ex.candidates.push_back(encode_candidate(vocab, f));
    ex.gold = *inst->gold;
    examples.push_back(std::move(ex));
  }
  Rng rng(cfg.seed);
  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const size_t k = cfg.members;
  for (size_t m = 0; m < k; ++m) {
    std::vector<LinkExample> train, dev;
    for (size_t i = 0; i < order.size(); ++i) {
      const bool held = k > 1 && i * k / order.size() == m;
      (held ? dev : train).push_back(examples[order[i]]);
    }
    if (train.empty()) train = dev;
    RankerConfig member_cfg = cfg;
    member_cfg.seed = cfg.seed + 1000 * (m + 1);
    auto r = train_ranker_params(init_ranker(cfg, vocab.size(), member_cfg.seed), train,
                                 dev, member_cfg);
    out.members.push_back({cfg, vocab, std::move(r.best)});
  }
  return out;
}

struct LinkDecision {
  size_t index = 0;
  Vec posterior;  // mean over members
};

// Mean of the members' posteriors; the highest wins. Ties prefer a KB entry
// over Nil, then a higher hot bin, then the smaller kb_id.
inline LinkDecision link(const std::vector<const RankerModel*>& models,
                         const std::vector<RawFeatures>& list) {
  if (list.empty()) throw Error(ErrorCode::EmptyList, "empty candidate list");
  if (models.empty()) throw Error(ErrorCode::MissingArtifact, "no ranker models");
  LinkDecision d;
  d.posterior.assign(list.size(), 0.0);
  for (const auto* m : models) {
    auto out = rank(m->params, m->encode(list));
    for (size_t k = 0; k < list.size(); ++k) d.posterior[k] += out.posterior[k];
  }
  for (double& p : d.posterior) p /= static_cast<double>(models.size());
  auto better = [&](size_t a, size_t b) {
    if (d.posterior[a] != d.posterior[b]) return d.posterior[a] > d.posterior[b];
    if (list[a].nil != list[b].nil) return !list[a].nil;
    if (list[a].hot != list[b].hot) return list[a].hot > list[b].hot;
    return list[a].kb_id < list[b].kb_id;
  };
  for (size_t k = 1; k < list.size(); ++k)
    if (better(k, d.index)) d.index = k;
  return d;
}

}  // namespace edl::el

#endif  // EDL_EL_RANKER_HPP_
