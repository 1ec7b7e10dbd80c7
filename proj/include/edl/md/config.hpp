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

#ifndef EDL_MD_CONFIG_HPP_
#define EDL_MD_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "edl/common.hpp"
#include "edl/utf8.hpp"

namespace edl::md {

enum class ModelKind { CRNNLM, Seq2Seq };

inline const char* to_string(ModelKind k) {
  return k == ModelKind::CRNNLM ? "crnnlm" : "seq2seq";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "crnnlm") return ModelKind::CRNNLM;
  if (s == "seq2seq") return ModelKind::Seq2Seq;
  throw Error(ErrorCode::InvalidConfig, "unknown model kind '" +
                                            std::string(s) + "'");
}

// Desk-scale defaults. paper_scale() gives the five-layer, 512-map setup.
struct TaggerConfig {
  size_t conv_layers = 2;
  size_t filter_size = 3;
  size_t feature_maps = 32;
  size_t embed_dim = 32;
  size_t gru_dim = 64;
  size_t attention_dim = 32;
  size_t output_hidden = 64;
  size_t beam_width = 10;
  size_t max_epochs = 30;
  size_t patience = 5;
  size_t batch_size = 1;
  double rho = 0.95;
  double epsilon = 1e-6;
  std::uint64_t seed = 1;

  static TaggerConfig paper_scale() {
    TaggerConfig c;
    c.conv_layers = 5;
    c.feature_maps = 512;
    return c;
  }

  void validate() const {
    if (beam_width < 1)
      throw Error(ErrorCode::InvalidConfig, "beam_width must be >= 1");
    if (filter_size % 2 == 0)
      throw Error(ErrorCode::InvalidConfig, "filter_size must be odd");
    if (conv_layers < 1 || feature_maps < 1 || embed_dim < 1 || gru_dim < 1 ||
        attention_dim < 1 || output_hidden < 1 || batch_size < 1)
      throw Error(ErrorCode::InvalidConfig, "dimensions must be positive");
  }

  // Fields that determine parameter shapes.
  bool same_shape(const TaggerConfig& o) const {
    return conv_layers == o.conv_layers && filter_size == o.filter_size &&
           feature_maps == o.feature_maps && embed_dim == o.embed_dim &&
           gru_dim == o.gru_dim && attention_dim == o.attention_dim &&
           output_hidden == o.output_hidden;
  }

  std::map<std::string, std::string> to_map() const {
    return {{"conv_layers", std::to_string(conv_layers)},
            {"filter_size", std::to_string(filter_size)},
            {"feature_maps", std::to_string(feature_maps)},
            {"embed_dim", std::to_string(embed_dim)},
            {"gru_dim", std::to_string(gru_dim)},
            {"attention_dim", std::to_string(attention_dim)},
            {"output_hidden", std::to_string(output_hidden)},
            {"beam_width", std::to_string(beam_width)},
            {"max_epochs", std::to_string(max_epochs)},
            {"patience", std::to_string(patience)},
            {"batch_size", std::to_string(batch_size)},
            {"seed", std::to_string(seed)}};
  }

  // Unknown keys are ignored so one file can carry several sections.
  void apply(const std::map<std::string, std::string>& kv,
             const std::string& prefix = "") {
    auto get = [&](const char* key, size_t& field) {
      auto it = kv.find(prefix + key);
      if (it == kv.end()) return;
      try {
        field = std::stoul(it->second);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig,
                    "bad value for " + prefix + key + ": " + it->second);
      }
    };
    get("conv_layers", conv_layers);
    get("filter_size", filter_size);
    get("feature_maps", feature_maps);
    get("embed_dim", embed_dim);
    get("gru_dim", gru_dim);
    get("attention_dim", attention_dim);
    get("output_hidden", output_hidden);
    get("beam_width", beam_width);
    get("max_epochs", max_epochs);
    get("patience", patience);
    get("batch_size", batch_size);
    size_t s = seed;
    get("seed", s);
    seed = s;
  }
};

// Token vocabulary; id 0 is the unknown token.
class Vocab {
 public:
  Vocab() { words_.push_back("<unk>"); }

  explicit Vocab(const std::vector<std::string>& words) : Vocab() {
    for (const auto& w : words) add(w);
  }

  int add(const std::string& w) {
    auto [it, inserted] = index_.try_emplace(w, static_cast<int>(words_.size()));
    if (inserted) words_.push_back(w);
    return it->second;
  }

  int id(const std::string& w) const {
    auto it = index_.find(w);
    return it == index_.end() ? 0 : it->second;
  }

  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // Newline-joined words after the unknown token.
  std::string serialize() const {
    std::vector<std::string> rest(words_.begin() + 1, words_.end());
    return text::join(rest, "\n");
  }

  static Vocab deserialize(const std::string& s) {
    Vocab v;
    if (s.empty()) return v;
    for (const auto& w : text::split(s, '\n')) v.add(w);
    return v;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace edl::md

#endif  // EDL_MD_CONFIG_HPP_
