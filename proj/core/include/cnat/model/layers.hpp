// Copyright 2026 The cnat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cnat/numcore/autodiff.hpp"

namespace cnat::model {

using num::Tensor;
using num::Var;

/// Named, ordered parameter registry. Order is construction order, which is
/// what checkpoints and the optimizer rely on.
template <typename T>
class ParameterSet {
 public:
  Var<T> add(const std::string& name, Tensor<T> value);

  std::vector<Var<T>>& vars() { return vars_; }
  const std::vector<Var<T>>& vars() const { return vars_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return vars_.size(); }
  std::int64_t scalar_count() const;

  void zero_grad();
  void set_trainable(bool trainable);

 private:
  std::vector<std::string> names_;
  std::vector<Var<T>> vars_;
};

/// State shared by one forward evaluation.
struct ForwardContext {
  bool training = false;
  double dropout = 0.0;
  num::Rng* rng = nullptr;

  static ForwardContext inference() { return {}; }
};

template <typename T>
struct Linear {
  Var<T> weight;  // in x out
  Var<T> bias;    // out

  Linear() = default;
  Linear(ParameterSet<T>& params, const std::string& name, int in, int out, num::Rng& rng);
  Var<T> operator()(const Var<T>& x) const;
};

template <typename T>
struct LayerNorm {
  Var<T> gamma;
  Var<T> beta;

  LayerNorm() = default;
  LayerNorm(ParameterSet<T>& params, const std::string& name, int width);
  Var<T> operator()(const Var<T>& x) const;
};

/// Multi-head attention with separate query/key/value sources.
template <typename T>
struct Attention {
  Linear<T> query, key, value, output;
  int heads = 1;

  Attention() = default;
  Attention(ParameterSet<T>& params, const std::string& name, int width, int heads, num::Rng& rng);

  Var<T> operator()(const Var<T>& query_src, const Var<T>& key_src, const Var<T>& value_src,
                    const std::vector<std::uint8_t>* allowed = nullptr, Tensor<T>* weights_out = nullptr) const;
  /// Attention over already-projected keys and values.
  Var<T> attend(const Var<T>& q_proj, const Var<T>& k_proj, const Var<T>& v_proj,
                const std::vector<std::uint8_t>* allowed = nullptr, Tensor<T>* weights_out = nullptr) const;
};

template <typename T>
struct FeedForward {
  Linear<T> inner, outer;

  FeedForward() = default;
  FeedForward(ParameterSet<T>& params, const std::string& name, int width, int hidden, num::Rng& rng);
  Var<T> operator()(const Var<T>& x, ForwardContext& ctx) const;
};

/// Self-attention + feed-forward, post-norm residuals. `allowed` selects
/// bidirectional (nullptr) or causal attention.
template <typename T>
struct SelfAttentionLayer {
  Attention<T> attention;
  LayerNorm<T> attention_norm;
  FeedForward<T> ffn;
  LayerNorm<T> ffn_norm;

  SelfAttentionLayer() = default;
  SelfAttentionLayer(ParameterSet<T>& params, const std::string& name, int width, int heads, int hidden,
                     num::Rng& rng);
  Var<T> operator()(const Var<T>& x, ForwardContext& ctx, const std::vector<std::uint8_t>* allowed = nullptr) const;
};

/// Sinusoidal encodings, rows 0..length-1.
template <typename T>
Tensor<T> sinusoidal_positions(int length, int width);

/// Self-attention mask: all ones for non-autoregressive decoding, lower
/// triangle (t attends s <= t) for autoregressive decoding.
std::vector<std::uint8_t> causal_mask(int length);

/// Token embedding scaled by sqrt(width), plus positions.
template <typename T>
Var<T> embed_tokens(const Var<T>& table, std::span<const int> ids, const Tensor<T>& positions, int pad_id);

}  // namespace cnat::model
