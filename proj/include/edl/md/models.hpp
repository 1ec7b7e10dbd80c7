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

#ifndef EDL_MD_MODELS_HPP_
#define EDL_MD_MODELS_HPP_

// The two entity-discovery networks. Both share a convolutional encoder
// (token embeddings followed by same-padded conv1d layers, tanh after each)
// and differ in the decoder:
//
//   CRNNLM   P(y_i | X, y_<i): a GRU reads [tag_embed(y_{i-1}) ; h_i] and a
//            softmax layer predicts the flat BIO tag.
//   Seq2Seq  Attention decoder over the bracket/placeholder alphabet:
//            e_ti = v . tanh(A_s s_{t-1} + A_h h_i + b), alpha = softmax(e),
//            c_t = sum_i alpha_ti h_i, s_t = GRU(s_{t-1}, [E(y_{t-1}) ; c_t]),
//            P(y_t | ...) = softmax(W_o tanh(W_g [E(y_{t-1}) ; s_t ; c_t])).

#include <string>
#include <vector>

#include "edl/md/config.hpp"
#include "edl/neural/layers.hpp"
#include "edl/nested_codec.hpp"

namespace edl::md {

using nn::CSpan;
using nn::ParameterStore;
using nn::Tensor;
using nn::Vec;

inline constexpr int kTagBos = codec::kTagCount;         // 21
inline constexpr int kSymbolBos = codec::kSymbolCount;   // 22

inline void init_encoder(ParameterStore& store, const TaggerConfig& cfg,
                         size_t vocab_size, Rng& rng) {
  nn::add_embedding(store, "enc.embed", vocab_size, cfg.embed_dim, rng);
  size_t in = cfg.embed_dim;
  for (size_t l = 0; l < cfg.conv_layers; ++l) {
    std::string p = "enc.conv" + std::to_string(l);
    nn::init_glorot(
        store.add(p + ".K", {cfg.filter_size, in, cfg.feature_maps}).value,
        cfg.filter_size * in, cfg.filter_size * cfg.feature_maps, rng);
    store.add(p + ".b", {cfg.feature_maps});
    in = cfg.feature_maps;
  }
}

inline ParameterStore init_crnnlm(const TaggerConfig& cfg, size_t vocab_size,
                                  std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ParameterStore store;
  init_encoder(store, cfg, vocab_size, rng);
  nn::add_embedding(store, "tag.embed", codec::kTagCount + 1, cfg.embed_dim,
                    rng);
  nn::add_gru(store, "dec.gru", cfg.embed_dim + cfg.feature_maps, cfg.gru_dim,
              rng);
  nn::add_dense(store, "out", cfg.gru_dim, codec::kTagCount, rng);
  return store;
}

inline ParameterStore init_seq2seq(const TaggerConfig& cfg, size_t vocab_size,
                                   std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ParameterStore store;
  init_encoder(store, cfg, vocab_size, rng);
  nn::add_embedding(store, "sym.embed", codec::kSymbolCount + 1, cfg.embed_dim,
                    rng);
  const size_t a = cfg.attention_dim;
  nn::init_glorot(store.add("att.Ws", {a, cfg.gru_dim}).value, cfg.gru_dim, a,
                  rng);
  nn::init_glorot(store.add("att.Wh", {a, cfg.feature_maps}).value,
                  cfg.feature_maps, a, rng);
  store.add("att.b", {a});
  nn::init_glorot(store.add("att.v", {1, a}).value, a, 1, rng);
  nn::add_gru(store, "dec.gru", cfg.embed_dim + cfg.feature_maps, cfg.gru_dim,
              rng);
  nn::add_dense(store, "g.hidden",
                cfg.embed_dim + cfg.gru_dim + cfg.feature_maps,
                cfg.output_hidden, rng);
  nn::add_dense(store, "g.out", cfg.output_hidden, codec::kSymbolCount, rng);
  return store;
}

inline ParameterStore init_model(ModelKind kind, const TaggerConfig& cfg,
                                 size_t vocab_size, std::uint64_t seed) {
  return kind == ModelKind::CRNNLM ? init_crnnlm(cfg, vocab_size, seed)
                                   : init_seq2seq(cfg, vocab_size, seed);
}

// ---------------------------------------------------------------------------
// Encoder

struct EncoderCache {
  std::vector<int> ids;
  std::vector<Tensor> layer_inputs;
  std::vector<Tensor> layer_outputs;  // after tanh
};

inline size_t conv_layer_count(const ParameterStore& store) {
  size_t n = 0;
  while (store.contains("enc.conv" + std::to_string(n) + ".K")) ++n;
  return n;
}

// Returns h (T x F).
inline Tensor encode(const ParameterStore& store, const std::vector<int>& ids,
                     EncoderCache* cache = nullptr) {
  if (ids.empty()) throw Error(ErrorCode::EmptySentence, "empty sentence");
  const Tensor& embed = store.at("enc.embed").value;
  const size_t dim = embed.dim(1);
  Tensor x = Tensor::mat(ids.size(), dim);
  for (size_t t = 0; t < ids.size(); ++t) {
    size_t id = static_cast<size_t>(ids[t]);
    if (id >= embed.dim(0)) id = 0;
    auto src = embed.row(id);
    std::copy(src.begin(), src.end(), x.row(t).begin());
  }
  if (cache) {
    cache->ids = ids;
    cache->layer_inputs.clear();
    cache->layer_outputs.clear();
  }
  const size_t layers = conv_layer_count(store);
  for (size_t l = 0; l < layers; ++l) {
    std::string p = "enc.conv" + std::to_string(l);
    Tensor y = nn::conv1d_same(x, store.at(p + ".K").value,
                               store.at(p + ".b").value);
    for (double& v : y.values()) v = std::tanh(v);
    if (cache) {
      cache->layer_inputs.push_back(std::move(x));
      cache->layer_outputs.push_back(y);
    }
    x = std::move(y);
  }
  return x;
}

inline void encode_backward(ParameterStore& store, const EncoderCache& cache,
                            Tensor d_h) {
  for (size_t l = cache.layer_outputs.size(); l-- > 0;) {
    const Tensor& y = cache.layer_outputs[l];
    for (size_t i = 0; i < d_h.size(); ++i) d_h[i] *= 1.0 - y[i] * y[i];
    std::string p = "enc.conv" + std::to_string(l);
    d_h = nn::conv1d_same_backward(cache.layer_inputs[l], store.ref(p + ".K"),
                                   store.ref(p + ".b"), d_h);
  }
  nn::Parameter& embed = store.at("enc.embed");
  for (size_t t = 0; t < cache.ids.size(); ++t) {
    size_t id = static_cast<size_t>(cache.ids[t]);
    if (id >= embed.value.dim(0)) id = 0;
    nn::add_to(embed.grad.row(id), d_h.row(t));
  }
}

// ---------------------------------------------------------------------------
// Conditional RNN language model

// Step scorer over one encoded sentence. State is the GRU hidden vector.
class CrnnlmScorer {
 public:
  using State = Vec;

  CrnnlmScorer(const ParameterStore& store, Tensor h)
      : h_(std::move(h)),
        tag_embed_(&store.at("tag.embed").value),
        gru_(nn::bind_gru(store, "dec.gru")),
        out_(nn::bind_dense(store, "out")) {}

  size_t length() const { return h_.dim(0); }
  int alphabet_size() const { return codec::kTagCount; }
  int start_symbol() const { return kTagBos; }
  State initial() const { return Vec(gru_.hidden_dim(), 0.0); }
  const Tensor& encoded() const { return h_; }

  // Consumes the previous tag at position `pos`; returns log-probabilities of
  // the tag at `pos` and the advanced state.
  Vec step(const State& state, int prev, size_t pos, State& next,
           nn::GruCache* cache = nullptr) const {
    if (pos >= length())
      throw Error(ErrorCode::StepOutOfRange,
                  "step " + std::to_string(pos) + " of " +
                      std::to_string(length()));
    if (prev < 0 || prev > kTagBos)
      throw Error(ErrorCode::StepOutOfRange, "bad previous tag");
    Vec x = nn::concat({tag_embed_->row(static_cast<size_t>(prev)),
                        h_.row(pos)});
    next = nn::gru_step(gru_, state, x, cache);
    Vec logits = nn::dense(*out_.w, *out_.b, next, nn::Activation::Identity);
    return nn::log_softmax(logits);
  }

 private:
  Tensor h_;
  const Tensor* tag_embed_;
  nn::GruRef gru_;
  nn::DenseRef out_;
};

// Negative log-likelihood of a tag sequence; with `backward` the gradient is
// accumulated into the store.
inline double crnnlm_loss(ParameterStore& store, const std::vector<int>& ids,
                          const std::vector<int>& tags, bool backward) {
  if (tags.size() != ids.size())
    throw Error(ErrorCode::ShapeMismatch, "tag count differs from tokens");
  EncoderCache enc;
  const ParameterStore& cstore = store;
  CrnnlmScorer scorer(cstore, encode(cstore, ids, backward ? &enc : nullptr));
  const size_t steps = ids.size();
  std::vector<nn::GruCache> caches(steps);
  std::vector<Vec> states(steps + 1);
  std::vector<Vec> probs(steps);
  states[0] = scorer.initial();
  double loss = 0;
  int prev = kTagBos;
  for (size_t i = 0; i < steps; ++i) {
    Vec lp = scorer.step(states[i], prev, i, states[i + 1], &caches[i]);
    loss -= lp[static_cast<size_t>(tags[i])];
    if (backward) {
      probs[i].resize(lp.size());
      for (size_t k = 0; k < lp.size(); ++k) probs[i][k] = std::exp(lp[k]);
    }
    prev = tags[i];
  }
  if (!backward) return loss;

  auto gru = nn::bind_gru(store, "dec.gru");
  auto out = nn::bind_dense(store, "out");
  nn::Parameter& tag_embed = store.at("tag.embed");
  const Tensor& h = scorer.encoded();
  const size_t edim = tag_embed.value.dim(1);
  const size_t fdim = h.dim(1);
  Tensor d_h = Tensor::mat(steps, fdim);
  Vec ds(gru.hidden_dim(), 0.0);
  for (size_t i = steps; i-- > 0;) {
    Vec dlogits = probs[i];
    dlogits[static_cast<size_t>(tags[i])] -= 1.0;
    Vec dstate = nn::dense_backward(out.w, out.b, states[i + 1], {}, dlogits,
                                    nn::Activation::Identity);
    nn::add_to(dstate, ds);
    Vec dx(edim + fdim, 0.0);
    Vec dprev(gru.hidden_dim(), 0.0);
    nn::gru_backward(gru, caches[i], dstate, dx, dprev);
    int p = i == 0 ? kTagBos : tags[i - 1];
    nn::add_to(tag_embed.grad.row(static_cast<size_t>(p)),
               CSpan(dx).subspan(0, edim));
    nn::add_to(d_h.row(i), CSpan(dx).subspan(edim));
    ds = std::move(dprev);
  }
  encode_backward(store, enc, std::move(d_h));
  return loss;
}

// ---------------------------------------------------------------------------
// Attention encoder-decoder

struct AttentionContext {
  Vec c;      // context vector
  Vec alpha;  // attention weights over input positions
};

struct AttentionCache {
  std::vector<Vec> hidden;  // tanh(A_s s + A_h h_i + b) per position
};

// One-hidden-layer perceptron scores e_i = v . tanh(A_s s + P_i + b) with
// precomputed P_i = A_h h_i.
inline AttentionContext attn_context(CSpan s_prev, const Tensor& h,
                                     const Tensor& proj_h, const Tensor& a_s,
                                     const Tensor& a_b, const Tensor& v,
                                     AttentionCache* cache = nullptr) {
  const size_t steps = h.dim(0), adim = a_s.dim(0);
  if (proj_h.dim(0) != steps || proj_h.dim(1) != adim)
    throw Error(ErrorCode::ShapeMismatch, "attention: projection shape");
  nn::require_size(s_prev.size(), a_s.dim(1), "attention state");
  Vec q(a_b.values().begin(), a_b.values().end());
  nn::matvec_acc(a_s, s_prev, q);
  Vec e(steps);
  if (cache) cache->hidden.assign(steps, Vec(adim));
  for (size_t i = 0; i < steps; ++i) {
    double score = 0;
    auto p = proj_h.row(i);
    for (size_t k = 0; k < adim; ++k) {
      double u = std::tanh(q[k] + p[k]);
      if (cache) cache->hidden[i][k] = u;
      score += v[k] * u;
    }
    e[i] = score;
  }
  AttentionContext ctx;
  ctx.alpha = nn::softmax(e);
  ctx.c.assign(h.dim(1), 0.0);
  for (size_t i = 0; i < steps; ++i) {
    auto hi = h.row(i);
    for (size_t f = 0; f < ctx.c.size(); ++f) ctx.c[f] += ctx.alpha[i] * hi[f];
  }
  return ctx;
}

inline Tensor project_encoder(const Tensor& h, const Tensor& a_h) {
  if (a_h.dim(1) != h.dim(1))
    throw Error(ErrorCode::ShapeMismatch, "attention: encoder width");
  Tensor proj = Tensor::mat(h.dim(0), a_h.dim(0));
  for (size_t i = 0; i < h.dim(0); ++i) nn::matvec_acc(a_h, h.row(i), proj.row(i));
  return proj;
}

inline AttentionContext attn_context(CSpan s_prev, const Tensor& h,
                                     const ParameterStore& store) {
  const Tensor& a_h = store.at("att.Wh").value;
  return attn_context(s_prev, h, project_encoder(h, a_h),
                      store.at("att.Ws").value, store.at("att.b").value,
                      store.at("att.v").value);
}

struct Seq2seqStepCache {
  AttentionCache attention;
  AttentionContext context;
  nn::GruCache gru;
  Vec g_input, g_hidden;
};

class Seq2seqScorer {
 public:
  using State = Vec;

  Seq2seqScorer(const ParameterStore& store, Tensor h)
      : h_(std::move(h)),
        sym_embed_(&store.at("sym.embed").value),
        a_s_(&store.at("att.Ws").value),
        a_b_(&store.at("att.b").value),
        a_v_(&store.at("att.v").value),
        proj_(project_encoder(h_, store.at("att.Wh").value)),
        gru_(nn::bind_gru(store, "dec.gru")),
        hidden_(nn::bind_dense(store, "g.hidden")),
        out_(nn::bind_dense(store, "g.out")) {}

  size_t length() const { return h_.dim(0); }
  int alphabet_size() const { return codec::kSymbolCount; }
  int start_symbol() const { return kSymbolBos; }
  State initial() const { return Vec(gru_.hidden_dim(), 0.0); }
  const Tensor& encoded() const { return h_; }

  AttentionContext context(const State& s_prev,
                           AttentionCache* cache = nullptr) const {
    return attn_context(s_prev, h_, proj_, *a_s_, *a_b_, *a_v_, cache);
  }

  // Advances the decoder with a given context: returns log-probabilities of
  // the next symbol and the new state.
  Vec step_with_context(const State& state, int prev,
                        const AttentionContext& ctx, State& next,
                        Seq2seqStepCache* cache = nullptr) const {
    if (prev < 0 || prev > kSymbolBos)
      throw Error(ErrorCode::StepOutOfRange, "bad previous symbol");
    nn::require_size(ctx.c.size(), h_.dim(1), "context");
    auto emb = sym_embed_->row(static_cast<size_t>(prev));
    Vec x = nn::concat({emb, ctx.c});
    next = nn::gru_step(gru_, state, x, cache ? &cache->gru : nullptr);
    Vec g_in = nn::concat({emb, next, ctx.c});
    Vec g_hidden = nn::dense(*hidden_.w, *hidden_.b, g_in, nn::Activation::Tanh);
    Vec logits = nn::dense(*out_.w, *out_.b, g_hidden, nn::Activation::Identity);
    if (cache) {
      cache->g_input = std::move(g_in);
      cache->g_hidden = std::move(g_hidden);
    }
    return nn::log_softmax(logits);
  }

  Vec step(const State& state, int prev, size_t /*pos*/, State& next,
           Seq2seqStepCache* cache = nullptr) const {
    AttentionContext ctx =
        context(state, cache ? &cache->attention : nullptr);
    Vec lp = step_with_context(state, prev, ctx, next, cache);
    if (cache) cache->context = std::move(ctx);
    return lp;
  }

 private:
  Tensor h_;
  const Tensor* sym_embed_;
  const Tensor* a_s_;
  const Tensor* a_b_;
  const Tensor* a_v_;
  Tensor proj_;
  nn::GruRef gru_;
  nn::DenseRef hidden_, out_;
};

// Teacher-forced negative log-likelihood of a symbol sequence (ids, ending in
// End).
inline double seq2seq_loss(ParameterStore& store, const std::vector<int>& ids,
                           const std::vector<int>& symbols, bool backward) {
  if (symbols.empty())
    throw Error(ErrorCode::ShapeMismatch, "empty target sequence");
  EncoderCache enc;
  const ParameterStore& cstore = store;
  Seq2seqScorer scorer(cstore, encode(cstore, ids, backward ? &enc : nullptr));
  const size_t steps = symbols.size();
  std::vector<Seq2seqStepCache> caches(steps);
  std::vector<Vec> states(steps + 1);
  std::vector<Vec> probs(steps);
  states[0] = scorer.initial();
  double loss = 0;
  int prev = kSymbolBos;
  for (size_t t = 0; t < steps; ++t) {
    Vec lp = scorer.step(states[t], prev, t, states[t + 1],
                         backward ? &caches[t] : nullptr);
    loss -= lp[static_cast<size_t>(symbols[t])];
    if (backward) {
      probs[t].resize(lp.size());
      for (size_t k = 0; k < lp.size(); ++k) probs[t][k] = std::exp(lp[k]);
    }
    prev = symbols[t];
  }
  if (!backward) return loss;

  auto gru = nn::bind_gru(store, "dec.gru");
  auto hidden = nn::bind_dense(store, "g.hidden");
  auto out = nn::bind_dense(store, "g.out");
  nn::Parameter& sym_embed = store.at("sym.embed");
  nn::Parameter& a_s = store.at("att.Ws");
  nn::Parameter& a_h = store.at("att.Wh");
  nn::Parameter& a_b = store.at("att.b");
  nn::Parameter& a_v = store.at("att.v");
  const Tensor& h = scorer.encoded();
  const size_t n = h.dim(0), fdim = h.dim(1), edim = sym_embed.value.dim(1);
  const size_t hdim = gru.hidden_dim(), adim = a_s.value.dim(0);

  Tensor d_h = Tensor::mat(n, fdim);
  Tensor d_proj = Tensor::mat(n, adim);
  Vec ds(hdim, 0.0);  // gradient flowing into s_t from later steps
  for (size_t t = steps; t-- > 0;) {
    const auto& k = caches[t];
    Vec dlogits = probs[t];
    dlogits[static_cast<size_t>(symbols[t])] -= 1.0;
    Vec dg_hidden = nn::dense_backward(out.w, out.b, k.g_hidden, {}, dlogits,
                                       nn::Activation::Identity);
    Vec dg_in = nn::dense_backward(hidden.w, hidden.b, k.g_input, k.g_hidden,
                                   dg_hidden, nn::Activation::Tanh);
    const size_t prev_id =
        static_cast<size_t>(t == 0 ? kSymbolBos : symbols[t - 1]);
    // g input = [emb ; s_t ; c_t]
    Vec demb(dg_in.begin(), dg_in.begin() + static_cast<long>(edim));
    Vec dstate(dg_in.begin() + static_cast<long>(edim),
               dg_in.begin() + static_cast<long>(edim + hdim));
    Vec dc(dg_in.begin() + static_cast<long>(edim + hdim), dg_in.end());
    nn::add_to(dstate, ds);
    // GRU input = [emb ; c_t]
    Vec dx(edim + fdim, 0.0);
    Vec dprev(hdim, 0.0);
    nn::gru_backward(gru, k.gru, dstate, dx, dprev);
    for (size_t i = 0; i < edim; ++i) demb[i] += dx[i];
    for (size_t f = 0; f < fdim; ++f) dc[f] += dx[edim + f];
    nn::add_to(sym_embed.grad.row(prev_id), demb);

    // c = sum_i alpha_i h_i
    const auto& alpha = k.context.alpha;
    Vec dalpha(n);
    double weighted = 0;
    for (size_t i = 0; i < n; ++i) {
      auto hi = h.row(i);
      double s = 0;
      for (size_t f = 0; f < fdim; ++f) s += dc[f] * hi[f];
      dalpha[i] = s;
      weighted += alpha[i] * s;
      auto dhi = d_h.row(i);
      for (size_t f = 0; f < fdim; ++f) dhi[f] += alpha[i] * dc[f];
    }
    // e_i = v . u_i, u_i = tanh(A_s s_prev + P_i + b)
    Vec dq(adim, 0.0);
    const Vec& s_prev = k.gru.h_prev;
    for (size_t i = 0; i < n; ++i) {
      const double de = alpha[i] * (dalpha[i] - weighted);
      const Vec& u = k.attention.hidden[i];
      auto dp = d_proj.row(i);
      for (size_t a = 0; a < adim; ++a) {
        a_v.grad[a] += de * u[a];
        const double da = de * a_v.value[a] * (1.0 - u[a] * u[a]);
        dq[a] += da;
        dp[a] += da;
      }
    }
    nn::outer_acc(a_s.grad, dq, s_prev);
    nn::add_to(a_b.grad.values(), dq);
    nn::matvec_t_acc(a_s.value, dq, dprev);
    ds = std::move(dprev);
  }
  for (size_t i = 0; i < n; ++i) {
    nn::outer_acc(a_h.grad, d_proj.row(i), h.row(i));
    nn::matvec_t_acc(a_h.value, d_proj.row(i), d_h.row(i));
  }
  encode_backward(store, enc, std::move(d_h));
  return loss;
}

}  // namespace edl::md

#endif  // EDL_MD_MODELS_HPP_
