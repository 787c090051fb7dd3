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
#include <optional>
#include <span>
#include <vector>

#include "cnat/model/config.hpp"
#include "cnat/model/layers.hpp"

namespace cnat::model {

/// y = x_1 repeated f_1 times, then x_2 repeated f_2 times, ... Raises
/// LengthMismatch when |F| != |x| and EmptyDecoderInput when sum(F) == 0.
std::vector<int> copy_by_fertility(std::span<const int> tokens, std::span<const int> fertility);

/// Spreads `target_length` over `source_length` slots: floor(T/S) each, plus
/// one for the first T mod S. Raises InfeasibleLength when T > S * max_fertility.
std::vector<int> uniform_fertility(int source_length, int target_length, int max_fertility);

/// Self-attention pattern of the decoder: everything allowed for
/// non-autoregressive decoding, lower-triangular for autoregressive decoding.
std::vector<std::uint8_t> build_self_attention_mask(int length, DecodeMode mode);

template <typename T>
struct FertilityPrediction {
  Var<T> logits;               // S x (max_fertility + 1)
  std::vector<int> fertility;  // per-position argmax
};

/// Optional probes filled by decode().
template <typename T>
struct DecodeTrace {
  std::vector<Tensor<T>> positional_weights;  // per layer: heads x T x T
};

struct GenerateOptions {
  /// When false the vocabulary projection is skipped and only the label is
  /// produced.
  bool explain = true;
  /// Forces the explanation length (uniform fertility for NAR decoding, EOS
  /// suppression for AR decoding). Used by the latency benchmark.
  std::optional<int> forced_length;
};

struct GenerationOutput {
  int label = -1;
  std::vector<double> label_probs;
  std::vector<int> explanation;
  Tensor<float> token_probs;  // T x V; empty when explain is false
  std::vector<int> fertility;
  std::int64_t latency_ns = 0;
  int decoder_passes = 0;
  int emitted_tokens = 0;  // AR: generated tokens including the closing EOS
  bool truncated = false;
};

/// Encoder stack, decoder stack, fertility predictor, explanation predictor
/// and label predictor. In autoregressive mode the same network decodes one
/// token at a time with causal masks.
template <typename T>
class CnatModel {
 public:
  CnatModel(const ModelConfig& config, std::uint64_t seed);

  CnatModel(CnatModel&&) noexcept = default;
  CnatModel& operator=(CnatModel&&) noexcept = default;
  CnatModel(const CnatModel&) = delete;
  CnatModel& operator=(const CnatModel&) = delete;

  /// Deep copy; parameters are not shared.
  CnatModel clone() const;

  const ModelConfig& config() const { return config_; }
  ParameterSet<T>& parameters() { return params_; }
  const ParameterSet<T>& parameters() const { return params_; }
  const Var<T>& token_embedding() const { return embedding_; }

  /// S x d contextual states. Raises EmptyInput / LengthOverflow / BadTokenId.
  Var<T> encode(std::span<const int> tokens, ForwardContext& ctx) const;

  FertilityPrediction<T> predict_fertility(const Var<T>& encoded) const;

  /// T x d decoder states. Each layer: self-attention (mode mask), positional
  /// attention, cross-attention over `encoded`, feed-forward.
  Var<T> decode(std::span<const int> decoder_input, const Var<T>& encoded, ForwardContext& ctx,
                DecodeTrace<T>* trace = nullptr) const;

  Var<T> explanation_logits(const Var<T>& decoded) const;
  /// Per-position softmax over the vocabulary.
  Var<T> predict_explanation(const Var<T>& decoded) const;
  /// Per-position MLP, mean pooling over positions; returns pooled logits.
  Var<T> label_logits(const Var<T>& decoded) const;
  Var<T> predict_label(const Var<T>& decoded) const;

  /// One parallel decode: encode, fertility argmax, copy, one decoder pass.
  GenerationOutput generate(std::span<const int> tokens, const GenerateOptions& options = {}) const;
  /// Token-by-token decode from BOS with cached keys and values; requires
  /// autoregressive mode.
  GenerationOutput generate_autoregressive(std::span<const int> tokens, const GenerateOptions& options = {}) const;

  /// Instrumentation: decoder stack evaluations since construction.
  std::uint64_t decoder_passes() const;

 private:
  struct DecoderLayer {
    Attention<T> self_attention;
    LayerNorm<T> self_norm;
    Attention<T> positional_attention;
    LayerNorm<T> positional_norm;
    Attention<T> cross_attention;
    LayerNorm<T> cross_norm;
    FeedForward<T> ffn;
    LayerNorm<T> ffn_norm;
  };

  void build(std::uint64_t seed);
  void count_pass() const;

  ModelConfig config_;
  ParameterSet<T> params_;
  Tensor<T> positions_;
  Var<T> embedding_;
  std::vector<SelfAttentionLayer<T>> encoder_;
  std::vector<DecoderLayer> decoder_;
  Linear<T> fertility_head_;
  Linear<T> explanation_head_;
  Linear<T> label_hidden_;
  Linear<T> label_out_;
  std::uint64_t seed_ = 0;
  mutable std::uint64_t passes_ = 0;
};

extern template class CnatModel<float>;
extern template class CnatModel<double>;

}  // namespace cnat::model
