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

#include "cnat/model/layers.hpp"

#include <cmath>

#include "cnat/error.hpp"

namespace cnat::model {

template <typename T>
Var<T> ParameterSet<T>::add(const std::string& name, Tensor<T> value) {
  auto v = Var<T>::parameter(std::move(value));
  names_.push_back(name);
  vars_.push_back(v);
  return v;
}

template <typename T>
std::int64_t ParameterSet<T>::scalar_count() const {
  std::int64_t n = 0;
  for (const auto& v : vars_) n += v.value().size();
  return n;
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& v : vars_) v.zero_grad();
}

template <typename T>
void ParameterSet<T>::set_trainable(bool trainable) {
  for (auto& v : vars_) v.set_requires_grad(trainable);
}

namespace {

template <typename T>
Tensor<T> normal_tensor(num::Shape shape, double stddev, num::Rng& rng) {
  Tensor<T> t(std::move(shape));
  for (auto& v : t.data()) v = static_cast<T>(rng.normal() * stddev);
  return t;
}

}  // namespace

template <typename T>
Linear<T>::Linear(ParameterSet<T>& params, const std::string& name, int in, int out, num::Rng& rng) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(in + out));
  weight = params.add(name + ".weight", normal_tensor<T>({in, out}, stddev, rng));
  bias = params.add(name + ".bias", Tensor<T>({out}));
}

template <typename T>
Var<T> Linear<T>::operator()(const Var<T>& x) const {
  return num::add_bias(num::matmul(x, weight), bias);
}

template <typename T>
LayerNorm<T>::LayerNorm(ParameterSet<T>& params, const std::string& name, int width) {
  gamma = params.add(name + ".gamma", Tensor<T>({width}, T(1)));
  beta = params.add(name + ".beta", Tensor<T>({width}));
}

template <typename T>
Var<T> LayerNorm<T>::operator()(const Var<T>& x) const {
  return num::layer_norm(x, gamma, beta);
}

template <typename T>
Attention<T>::Attention(ParameterSet<T>& params, const std::string& name, int width, int heads_, num::Rng& rng)
    : query(params, name + ".q", width, width, rng),
      key(params, name + ".k", width, width, rng),
      value(params, name + ".v", width, width, rng),
      output(params, name + ".o", width, width, rng),
      heads(heads_) {}

template <typename T>
Var<T> Attention<T>::operator()(const Var<T>& query_src, const Var<T>& key_src, const Var<T>& value_src,
                                const std::vector<std::uint8_t>* allowed, Tensor<T>* weights_out) const {
  return attend(query(query_src), key(key_src), value(value_src), allowed, weights_out);
}

template <typename T>
Var<T> Attention<T>::attend(const Var<T>& q_proj, const Var<T>& k_proj, const Var<T>& v_proj,
                            const std::vector<std::uint8_t>* allowed, Tensor<T>* weights_out) const {
  return output(num::multi_head_attention(q_proj, k_proj, v_proj, heads, allowed, weights_out));
}

template <typename T>
FeedForward<T>::FeedForward(ParameterSet<T>& params, const std::string& name, int width, int hidden, num::Rng& rng)
    : inner(params, name + ".inner", width, hidden, rng), outer(params, name + ".outer", hidden, width, rng) {}

template <typename T>
Var<T> FeedForward<T>::operator()(const Var<T>& x, ForwardContext& ctx) const {
  auto h = num::relu(inner(x));
  if (ctx.training && ctx.rng) h = num::dropout(h, ctx.dropout, *ctx.rng, true);
  return outer(h);
}

template <typename T>
SelfAttentionLayer<T>::SelfAttentionLayer(ParameterSet<T>& params, const std::string& name, int width, int heads,
                                          int hidden, num::Rng& rng)
    : attention(params, name + ".self", width, heads, rng),
      attention_norm(params, name + ".self_norm", width),
      ffn(params, name + ".ffn", width, hidden, rng),
      ffn_norm(params, name + ".ffn_norm", width) {}

namespace {

template <typename T>
Var<T> maybe_dropout(const Var<T>& x, ForwardContext& ctx) {
  if (!ctx.training || ctx.rng == nullptr) return x;
  return num::dropout(x, ctx.dropout, *ctx.rng, true);
}

}  // namespace

template <typename T>
Var<T> SelfAttentionLayer<T>::operator()(const Var<T>& x, ForwardContext& ctx,
                                         const std::vector<std::uint8_t>* allowed) const {
  auto h = attention_norm(num::add(x, maybe_dropout(attention(x, x, x, allowed), ctx)));
  return ffn_norm(num::add(h, maybe_dropout(ffn(h, ctx), ctx)));
}

template <typename T>
Tensor<T> sinusoidal_positions(int length, int width) {
  Tensor<T> pe({length, width});
  for (int pos = 0; pos < length; ++pos) {
    for (int i = 0; i < width; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / width);
      pe.at(pos, i) = static_cast<T>(std::sin(pos * freq));
      if (i + 1 < width) pe.at(pos, i + 1) = static_cast<T>(std::cos(pos * freq));
    }
  }
  return pe;
}

std::vector<std::uint8_t> causal_mask(int length) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(length) * length, 0);
  for (int t = 0; t < length; ++t) {
    for (int s = 0; s <= t; ++s) mask[static_cast<std::size_t>(t) * length + s] = 1;
  }
  return mask;
}

template <typename T>
Var<T> embed_tokens(const Var<T>& table, std::span<const int> ids, const Tensor<T>& positions, int pad_id) {
  const int len = static_cast<int>(ids.size());
  const int width = table.cols();
  if (len > positions.rows()) {
    raise(ErrorCode::kLengthOverflow, "sequence of " + std::to_string(len) + " exceeds max length " +
                                          std::to_string(positions.rows()));
  }
  auto emb = num::scale(num::embedding_lookup(table, ids, pad_id), static_cast<T>(std::sqrt(static_cast<double>(width))));
  Tensor<T> pe({len, width});
  std::copy_n(positions.data().begin(), static_cast<std::ptrdiff_t>(len) * width, pe.data().begin());
  return num::add_constant(emb, pe);
}

#define CNAT_INSTANTIATE(T)                                                                               \
  template class ParameterSet<T>;                                                                         \
  template struct Linear<T>;                                                                              \
  template struct LayerNorm<T>;                                                                           \
  template struct Attention<T>;                                                                           \
  template struct FeedForward<T>;                                                                         \
  template struct SelfAttentionLayer<T>;                                                                  \
  template Tensor<T> sinusoidal_positions<T>(int, int);                                                   \
  template Var<T> embed_tokens<T>(const Var<T>&, std::span<const int>, const Tensor<T>&, int);

CNAT_INSTANTIATE(float)
CNAT_INSTANTIATE(double)

#undef CNAT_INSTANTIATE

}  // namespace cnat::model
