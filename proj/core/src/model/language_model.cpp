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

#include "cnat/model/language_model.hpp"

#include <cmath>

#include "cnat/error.hpp"
#include "cnat/tokens.hpp"

namespace cnat::model {

template <typename T>
LanguageModel<T>::LanguageModel(const ModelConfig& config, std::uint64_t seed) : config_(config), seed_(seed) {
  config_.validate();
  num::Rng rng(seed);
  const int d = config_.d_model;
  positions_ = sinusoidal_positions<T>(config_.max_length, d);
  Tensor<T> table({config_.vocab_size, d});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& v : table.data()) v = static_cast<T>(rng.normal() * stddev);
  std::fill_n(table.row(kPadId).begin(), d, T(0));
  embedding_ = params_.add("embedding", std::move(table));
  for (int l = 0; l < config_.decoder_layers; ++l) {
    layers_.emplace_back(params_, "lm." + std::to_string(l), d, config_.heads, config_.ffn_width, rng);
  }
  output_ = Linear<T>(params_, "lm.output", d, config_.vocab_size, rng);
}

template <typename T>
LanguageModel<T> LanguageModel<T>::clone() const {
  LanguageModel copy(config_, seed_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    copy.params_.vars()[i].mutable_value() = params_.vars()[i].value();
    copy.params_.vars()[i].set_requires_grad(params_.vars()[i].requires_grad());
  }
  return copy;
}

template <typename T>
void LanguageModel<T>::check_length(int len) const {
  if (len < 1) raise(ErrorCode::kEmptyInput, "LM scoring of an empty sentence");
  if (len > config_.max_length) {
    raise(ErrorCode::kLengthOverflow, "sentence of " + std::to_string(len) + " exceeds LM max length " +
                                          std::to_string(config_.max_length));
  }
}

template <typename T>
Var<T> LanguageModel<T>::logits_from_embeddings(const Var<T>& inputs, ForwardContext& ctx) const {
  const int len = inputs.rows();
  check_length(len);
  Tensor<T> pe({len, config_.d_model});
  std::copy_n(positions_.data().begin(), pe.size(), pe.data().begin());
  auto x = num::add_constant(inputs, pe);
  if (ctx.training && ctx.rng) x = num::dropout(x, ctx.dropout, *ctx.rng, true);
  const auto mask = causal_mask(len);
  for (const auto& layer : layers_) x = layer(x, ctx, &mask);
  return output_(x);
}

template <typename T>
Var<T> LanguageModel<T>::log_likelihood(std::span<const int> tokens, ForwardContext& ctx) const {
  const int len = static_cast<int>(tokens.size());
  check_length(len);
  std::vector<int> inputs{kBosId};
  inputs.insert(inputs.end(), tokens.begin(), tokens.end() - 1);
  const T emb_scale = static_cast<T>(std::sqrt(static_cast<double>(config_.d_model)));
  auto emb = num::scale(num::embedding_lookup(embedding_, inputs, kPadId), emb_scale);
  auto logp = num::log_softmax(logits_from_embeddings(emb, ctx));
  Tensor<T> selector({len, config_.vocab_size});
  for (int t = 0; t < len; ++t) {
    const int id = tokens[static_cast<std::size_t>(t)];
    if (id < 0 || id >= config_.vocab_size) raise(ErrorCode::kBadTokenId, "token id " + std::to_string(id) + " outside LM vocabulary");
    selector.at(t, id) = T(1);
  }
  return num::sum(num::mul(logp, Var<T>::constant(std::move(selector))));
}

template <typename T>
Var<T> LanguageModel<T>::soft_inputs(const Var<T>& token_probs) const {
  const int len = token_probs.rows();
  const T emb_scale = static_cast<T>(std::sqrt(static_cast<double>(config_.d_model)));
  std::vector<int> bos{kBosId};
  auto bos_row = num::embedding_lookup(embedding_, bos, kPadId);
  if (len == 1) return num::scale(bos_row, emb_scale);
  auto expected = num::matmul(num::slice_rows(token_probs, 0, len - 1), embedding_);
  return num::scale(num::concat_rows<T>({bos_row, expected}), emb_scale);
}

template <typename T>
Var<T> LanguageModel<T>::log_likelihood_soft(const Var<T>& token_probs, ForwardContext& ctx) const {
  if (token_probs.value().rank() != 2 || token_probs.cols() != config_.vocab_size) {
    raise(ErrorCode::kVocabMismatch, "distribution over " + std::to_string(token_probs.cols()) +
                                         " tokens fed to an LM with vocabulary " + std::to_string(config_.vocab_size));
  }
  check_length(token_probs.rows());
  auto logp = num::log_softmax(logits_from_embeddings(soft_inputs(token_probs), ctx));
  return num::sum(num::mul(token_probs, logp));
}

template <typename T>
std::vector<double> LanguageModel<T>::token_log_probs(std::span<const int> tokens) const {
  num::NoGradGuard no_grad;
  auto ctx = ForwardContext::inference();
  const int len = static_cast<int>(tokens.size());
  check_length(len);
  std::vector<int> inputs{kBosId};
  inputs.insert(inputs.end(), tokens.begin(), tokens.end() - 1);
  const T emb_scale = static_cast<T>(std::sqrt(static_cast<double>(config_.d_model)));
  auto emb = num::scale(num::embedding_lookup(embedding_, inputs, kPadId), emb_scale);
  auto logp = num::log_softmax(logits_from_embeddings(emb, ctx));
  std::vector<double> out;
  for (int t = 0; t < len; ++t) {
    const int id = tokens[static_cast<std::size_t>(t)];
    if (id < 0 || id >= config_.vocab_size) raise(ErrorCode::kBadTokenId, "token id " + std::to_string(id) + " outside LM vocabulary");
    out.push_back(static_cast<double>(logp.value().at(t, id)));
  }
  return out;
}

template class LanguageModel<float>;
template class LanguageModel<double>;

}  // namespace cnat::model
