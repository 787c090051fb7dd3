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

#include "cnat/model/cnat_model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

#include "cnat/error.hpp"
#include "cnat/tokens.hpp"

namespace cnat::model {

std::vector<int> copy_by_fertility(std::span<const int> tokens, std::span<const int> fertility) {
  if (tokens.size() != fertility.size()) {
    raise(ErrorCode::kLengthMismatch, "fertility sequence of " + std::to_string(fertility.size()) + " for " +
                                          std::to_string(tokens.size()) + " source tokens");
  }
  std::vector<int> out;
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    if (fertility[s] < 0) raise(ErrorCode::kInvalidArgument, "negative fertility");
    out.insert(out.end(), static_cast<std::size_t>(fertility[s]), tokens[s]);
  }
  if (out.empty()) raise(ErrorCode::kEmptyDecoderInput, "all fertilities are zero");
  return out;
}

std::vector<int> uniform_fertility(int source_length, int target_length, int max_fertility) {
  if (source_length <= 0) raise(ErrorCode::kEmptyInput, "uniform_fertility with empty source");
  if (target_length < 0 || static_cast<std::int64_t>(target_length) > static_cast<std::int64_t>(source_length) * max_fertility) {
    raise(ErrorCode::kInfeasibleLength, "target length " + std::to_string(target_length) + " cannot be spread over " +
                                            std::to_string(source_length) + " tokens with fertility <= " +
                                            std::to_string(max_fertility));
  }
  std::vector<int> f(static_cast<std::size_t>(source_length), target_length / source_length);
  for (int s = 0; s < target_length % source_length; ++s) ++f[static_cast<std::size_t>(s)];
  return f;
}

std::vector<std::uint8_t> build_self_attention_mask(int length, DecodeMode mode) {
  if (length < 1) raise(ErrorCode::kInvalidArgument, "mask length must be >= 1");
  if (mode == DecodeMode::kAutoregressive) return causal_mask(length);
  return std::vector<std::uint8_t>(static_cast<std::size_t>(length) * length, 1);
}

namespace {

template <typename T>
Var<T> maybe_dropout(const Var<T>& x, ForwardContext& ctx) {
  if (!ctx.training || ctx.rng == nullptr) return x;
  return num::dropout(x, ctx.dropout, *ctx.rng, true);
}

template <typename T>
Var<T> row_var(const Tensor<T>& m, int r) {
  auto src = m.row(r);
  return Var<T>::constant(Tensor<T>({1, m.cols()}, std::vector<T>(src.begin(), src.end())));
}

template <typename T>
int argmax(std::span<const T> xs) {
  return static_cast<int>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

// Growing row store for cached keys/values.
template <typename T>
struct RowCache {
  int width = 0;
  std::vector<T> data;

  void append(const Tensor<T>& row) { data.insert(data.end(), row.data().begin(), row.data().end()); }
  Var<T> view() const {
    return Var<T>::constant(Tensor<T>({static_cast<int>(data.size()) / width, width}, data));
  }
};

}  // namespace

template <typename T>
CnatModel<T>::CnatModel(const ModelConfig& config, std::uint64_t seed) : config_(config), seed_(seed) {
  config_.validate();
  build(seed);
}

template <typename T>
void CnatModel<T>::build(std::uint64_t seed) {
  num::Rng rng(seed);
  const int d = config_.d_model;
  positions_ = sinusoidal_positions<T>(config_.max_length, d);

  Tensor<T> table({config_.vocab_size, d});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& v : table.data()) v = static_cast<T>(rng.normal() * stddev);
  std::fill_n(table.row(kPadId).begin(), d, T(0));
  embedding_ = params_.add("embedding", std::move(table));

  for (int l = 0; l < config_.encoder_layers; ++l) {
    encoder_.emplace_back(params_, "encoder." + std::to_string(l), d, config_.heads, config_.ffn_width, rng);
  }
  for (int l = 0; l < config_.decoder_layers; ++l) {
    const std::string p = "decoder." + std::to_string(l);
    DecoderLayer layer;
    layer.self_attention = Attention<T>(params_, p + ".self", d, config_.heads, rng);
    layer.self_norm = LayerNorm<T>(params_, p + ".self_norm", d);
    layer.positional_attention = Attention<T>(params_, p + ".positional", d, config_.heads, rng);
    layer.positional_norm = LayerNorm<T>(params_, p + ".positional_norm", d);
    layer.cross_attention = Attention<T>(params_, p + ".cross", d, config_.heads, rng);
    layer.cross_norm = LayerNorm<T>(params_, p + ".cross_norm", d);
    layer.ffn = FeedForward<T>(params_, p + ".ffn", d, config_.ffn_width, rng);
    layer.ffn_norm = LayerNorm<T>(params_, p + ".ffn_norm", d);
    decoder_.push_back(std::move(layer));
  }
  fertility_head_ = Linear<T>(params_, "fertility", d, config_.max_fertility + 1, rng);
  explanation_head_ = Linear<T>(params_, "explanation", d, config_.vocab_size, rng);
  label_hidden_ = Linear<T>(params_, "label.hidden", d, config_.label_hidden, rng);
  label_out_ = Linear<T>(params_, "label.out", config_.label_hidden, config_.num_labels, rng);
}

template <typename T>
CnatModel<T> CnatModel<T>::clone() const {
  CnatModel copy(config_, seed_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    copy.params_.vars()[i].mutable_value() = params_.vars()[i].value();
  }
  return copy;
}

template <typename T>
void CnatModel<T>::count_pass() const {
  std::atomic_ref<std::uint64_t>(passes_).fetch_add(1, std::memory_order_relaxed);
}

template <typename T>
std::uint64_t CnatModel<T>::decoder_passes() const {
  return std::atomic_ref<std::uint64_t>(passes_).load(std::memory_order_relaxed);
}

template <typename T>
Var<T> CnatModel<T>::encode(std::span<const int> tokens, ForwardContext& ctx) const {
  if (tokens.empty()) raise(ErrorCode::kEmptyInput, "encode() on an empty sequence");
  auto x = maybe_dropout(embed_tokens(embedding_, tokens, positions_, kPadId), ctx);
  for (const auto& layer : encoder_) x = layer(x, ctx);
  return x;
}

template <typename T>
FertilityPrediction<T> CnatModel<T>::predict_fertility(const Var<T>& encoded) const {
  FertilityPrediction<T> out;
  out.logits = fertility_head_(encoded);
  const auto& v = out.logits.value();
  for (int s = 0; s < v.rows(); ++s) out.fertility.push_back(argmax<T>(v.row(s)));
  return out;
}

template <typename T>
Var<T> CnatModel<T>::decode(std::span<const int> decoder_input, const Var<T>& encoded, ForwardContext& ctx,
                            DecodeTrace<T>* trace) const {
  const int len = static_cast<int>(decoder_input.size());
  if (len == 0) raise(ErrorCode::kEmptyDecoderInput, "decode() on an empty decoder input");
  if (len > config_.max_length) {
    raise(ErrorCode::kLengthOverflow, "decoder input of " + std::to_string(len) + " exceeds max length " +
                                          std::to_string(config_.max_length));
  }
  count_pass();
  std::vector<std::uint8_t> mask;
  const std::vector<std::uint8_t>* allowed = nullptr;
  if (config_.mode == DecodeMode::kAutoregressive) {
    mask = build_self_attention_mask(len, config_.mode);
    allowed = &mask;
  }
  Tensor<T> pe({len, config_.d_model});
  std::copy_n(positions_.data().begin(), pe.size(), pe.data().begin());
  auto pos = Var<T>::constant(std::move(pe));

  auto x = maybe_dropout(embed_tokens(embedding_, decoder_input, positions_, kPadId), ctx);
  if (trace) trace->positional_weights.clear();
  for (const auto& layer : decoder_) {
    x = layer.self_norm(num::add(x, maybe_dropout(layer.self_attention(x, x, x, allowed), ctx)));
    Tensor<T> weights;
    auto positional = layer.positional_attention(pos, pos, x, allowed, trace ? &weights : nullptr);
    if (trace) trace->positional_weights.push_back(std::move(weights));
    x = layer.positional_norm(num::add(x, maybe_dropout(positional, ctx)));
    x = layer.cross_norm(num::add(x, maybe_dropout(layer.cross_attention(x, encoded, encoded), ctx)));
    x = layer.ffn_norm(num::add(x, maybe_dropout(layer.ffn(x, ctx), ctx)));
  }
  return x;
}

template <typename T>
Var<T> CnatModel<T>::explanation_logits(const Var<T>& decoded) const {
  return explanation_head_(decoded);
}

template <typename T>
Var<T> CnatModel<T>::predict_explanation(const Var<T>& decoded) const {
  return num::softmax(explanation_logits(decoded), -1);
}

template <typename T>
Var<T> CnatModel<T>::label_logits(const Var<T>& decoded) const {
  return num::mean(label_out_(num::relu(label_hidden_(decoded))), 0);
}

template <typename T>
Var<T> CnatModel<T>::predict_label(const Var<T>& decoded) const {
  return num::softmax(label_logits(decoded), 0);
}

template <typename T>
GenerationOutput CnatModel<T>::generate(std::span<const int> tokens, const GenerateOptions& options) const {
  num::NoGradGuard no_grad;
  auto ctx = ForwardContext::inference();
  GenerationOutput out;
  auto encoded = encode(tokens, ctx);
  const int source_len = static_cast<int>(tokens.size());

  if (options.forced_length) {
    out.fertility = uniform_fertility(source_len, *options.forced_length, config_.max_fertility);
  } else {
    auto fert = predict_fertility(encoded);
    out.fertility = std::move(fert.fertility);
    if (std::all_of(out.fertility.begin(), out.fertility.end(), [](int f) { return f == 0; })) {
      // Keep inference total: the position most confident in fertility 1 copies once.
      auto probs = num::softmax(fert.logits, -1);
      int best = 0;
      for (int s = 1; s < source_len; ++s) {
        if (probs.value().at(s, 1) > probs.value().at(best, 1)) best = s;
      }
      out.fertility[static_cast<std::size_t>(best)] = 1;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const auto passes_before = decoder_passes();
  auto decoder_input = copy_by_fertility(tokens, out.fertility);
  auto decoded = decode(decoder_input, encoded, ctx);
  auto label_probs = predict_label(decoded);
  if (options.explain) {
    auto probs = predict_explanation(decoded);
    const auto& p = probs.value();
    for (int t = 0; t < p.rows(); ++t) out.explanation.push_back(argmax<T>(p.row(t)));
    out.token_probs = p.template cast<float>();
  }
  out.latency_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  out.decoder_passes = static_cast<int>(decoder_passes() - passes_before);

  const auto& lp = label_probs.value();
  out.label_probs.assign(lp.data().begin(), lp.data().end());
  out.label = argmax<T>(lp.data());
  out.emitted_tokens = static_cast<int>(out.explanation.size());
  return out;
}

template <typename T>
GenerationOutput CnatModel<T>::generate_autoregressive(std::span<const int> tokens,
                                                       const GenerateOptions& options) const {
  if (config_.mode != DecodeMode::kAutoregressive) {
    raise(ErrorCode::kInvalidArgument, "generate_autoregressive() needs a model configured in AR mode");
  }
  num::NoGradGuard no_grad;
  auto ctx = ForwardContext::inference();
  GenerationOutput out;
  auto encoded = encode(tokens, ctx);
  const int d = config_.d_model;
  const T emb_scale = static_cast<T>(std::sqrt(static_cast<double>(d)));

  const auto start = std::chrono::steady_clock::now();
  const auto passes_before = decoder_passes();

  struct LayerCache {
    RowCache<T> self_k, self_v, pos_k, pos_v;
    Var<T> cross_k, cross_v;
  };
  std::vector<LayerCache> caches(decoder_.size());
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    auto& c = caches[l];
    c.self_k.width = c.self_v.width = c.pos_k.width = c.pos_v.width = d;
    c.cross_k = decoder_[l].cross_attention.key(encoded);
    c.cross_v = decoder_[l].cross_attention.value(encoded);
  }

  std::vector<Var<T>> final_rows;
  std::vector<float> prob_rows;
  int token = kBosId;
  const int target = options.forced_length.value_or(-1);
  for (int t = 0;; ++t) {
    if (target >= 0 && static_cast<int>(out.explanation.size()) >= target) break;
    if (t >= config_.max_length) {
      out.truncated = true;
      break;
    }
    count_pass();
    Tensor<T> input({1, d});
    for (int c = 0; c < d; ++c) {
      input.at(0, c) = (token == kPadId ? T(0) : embedding_.value().at(token, c) * emb_scale) + positions_.at(t, c);
    }
    auto x = Var<T>::constant(std::move(input));
    auto pos_row = row_var(positions_, t);
    for (std::size_t l = 0; l < decoder_.size(); ++l) {
      const auto& layer = decoder_[l];
      auto& c = caches[l];
      c.self_k.append(layer.self_attention.key(x).value());
      c.self_v.append(layer.self_attention.value(x).value());
      auto a = layer.self_attention.attend(layer.self_attention.query(x), c.self_k.view(), c.self_v.view());
      x = layer.self_norm(num::add(x, a));

      c.pos_k.append(layer.positional_attention.key(pos_row).value());
      c.pos_v.append(layer.positional_attention.value(x).value());
      a = layer.positional_attention.attend(layer.positional_attention.query(pos_row), c.pos_k.view(), c.pos_v.view());
      x = layer.positional_norm(num::add(x, a));

      a = layer.cross_attention.attend(layer.cross_attention.query(x), c.cross_k, c.cross_v);
      x = layer.cross_norm(num::add(x, a));
      x = layer.ffn_norm(num::add(x, layer.ffn(x, ctx)));
    }
    final_rows.push_back(x);

    auto logits = explanation_logits(x);
    auto& lv = logits.mutable_value();
    if (target >= 0) lv[kEosId] = T(-1e30);
    const int next = argmax<T>(lv.data());
    if (options.explain) {
      auto p = num::softmax(logits, -1);
      for (T v : p.value().data()) prob_rows.push_back(static_cast<float>(v));
    }
    ++out.emitted_tokens;
    if (next == kEosId) break;
    out.explanation.push_back(next);
    token = next;
  }

  auto label_probs = predict_label(num::concat_rows(final_rows));
  out.latency_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  out.decoder_passes = static_cast<int>(decoder_passes() - passes_before);
  if (options.explain) {
    const int rows = static_cast<int>(prob_rows.size()) / config_.vocab_size;
    out.token_probs = Tensor<float>({rows, config_.vocab_size}, std::move(prob_rows));
  } else {
    out.explanation.clear();
  }
  const auto& lp = label_probs.value();
  out.label_probs.assign(lp.data().begin(), lp.data().end());
  out.label = argmax<T>(lp.data());
  return out;
}

template class CnatModel<float>;
template class CnatModel<double>;

}  // namespace cnat::model
