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
#include <span>

#include "cnat/model/config.hpp"
#include "cnat/model/layers.hpp"

namespace cnat::model {

/// Decoder-only causal LM used both as the fluency discriminator during
/// training and as the perplexity scorer. Layer count is
/// `config.decoder_layers`; encoder and label fields are ignored.
///
/// A sentence e_1..e_T is scored as sum_t log p(e_t | BOS, e_1..e_{t-1});
/// there is no end-of-sentence term.
template <typename T>
class LanguageModel {
 public:
  LanguageModel(const ModelConfig& config, std::uint64_t seed);

  LanguageModel(LanguageModel&&) noexcept = default;
  LanguageModel& operator=(LanguageModel&&) noexcept = default;
  LanguageModel(const LanguageModel&) = delete;
  LanguageModel& operator=(const LanguageModel&) = delete;

  LanguageModel clone() const;

  const ModelConfig& config() const { return config_; }
  ParameterSet<T>& parameters() { return params_; }
  const ParameterSet<T>& parameters() const { return params_; }
  const Var<T>& token_embedding() const { return embedding_; }
  /// Output projection; zeroing it yields the uniform LM.
  const Linear<T>& output_head() const { return output_; }

  /// Stops gradients into the LM's own parameters; gradients still reach
  /// soft input distributions.
  void freeze() { params_.set_trainable(false); }
  void unfreeze() { params_.set_trainable(true); }

  /// Next-token logits (T x V) for input embeddings (T x d, already scaled).
  Var<T> logits_from_embeddings(const Var<T>& inputs, ForwardContext& ctx) const;

  /// Log-likelihood of a token sentence.
  Var<T> log_likelihood(std::span<const int> tokens, ForwardContext& ctx) const;

  /// Log-likelihood of a sentence given as per-position distributions
  /// (T x V): inputs are the expected embeddings P_t * E, and each position
  /// contributes sum_v P_t(v) log p(v | prefix). One-hot rows reproduce
  /// log_likelihood() exactly.
  Var<T> log_likelihood_soft(const Var<T>& token_probs, ForwardContext& ctx) const;

  /// Per-token log-probabilities of `tokens` (length T), no graph.
  std::vector<double> token_log_probs(std::span<const int> tokens) const;

 private:
  Var<T> soft_inputs(const Var<T>& token_probs) const;
  void check_length(int len) const;

  ModelConfig config_;
  std::uint64_t seed_;
  ParameterSet<T> params_;
  Tensor<T> positions_;
  Var<T> embedding_;
  std::vector<SelfAttentionLayer<T>> layers_;
  Linear<T> output_;
};

extern template class LanguageModel<float>;
extern template class LanguageModel<double>;

}  // namespace cnat::model
