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

#include "cnat/training/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "json.hpp"

#include "cnat/error.hpp"
#include "cnat/tokens.hpp"
#include "cnat/training/fertility.hpp"

namespace cnat::training {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kFull: return "full";
    case Regime::kWeak: return "weak";
    case Regime::kUnsup: return "unsup";
  }
  return "full";
}

Regime regime_from_string(const std::string& text) {
  if (text == "full") return Regime::kFull;
  if (text == "weak") return Regime::kWeak;
  if (text == "unsup") return Regime::kUnsup;
  raise(ErrorCode::kInvalidArgument, "unknown regime '" + text + "' (expected full, weak or unsup)");
}

PreparedExample prepare_example(const data::Example& example, const data::Vocab& vocab) {
  PreparedExample p;
  p.input = data::encode_input(example, vocab);
  if (example.explanation) p.explanation = vocab.tokenize(*example.explanation);
  if (example.alignment.size() == p.explanation.size()) p.alignment = example.alignment;
  p.label = example.label.value_or(-1);
  return p;
}

template <typename T>
LossParts<T> compute_losses(const model::CnatModel<T>& model, const PreparedExample& ex, const TrainConfig& config,
                            const model::LanguageModel<T>* lm, model::ForwardContext& ctx) {
  const auto& mc = model.config();
  LossParts<T> parts;
  auto encoded = model.encode(ex.input, ctx);
  if (!config.use_explanation_targets) {
    auto decoded = model.decode(ex.input, encoded, ctx);
    parts.label = label_loss(model.label_logits(decoded), ex.label);
    if (config.weights.lm > 0.0 && lm != nullptr) {
      parts.lm = lm_fluency_loss(num::softmax(model.explanation_logits(decoded), -1), *lm);
    }
    return parts;
  }
  if (ex.explanation.empty()) raise(ErrorCode::kRegimeDataMismatch, "record has no explanation tokens");

  Var<T> token_logits;
  Var<T> decoded;
  const int T_len = static_cast<int>(ex.explanation.size());
  if (mc.mode == model::DecodeMode::kAutoregressive) {
    std::vector<int> input{kBosId};
    input.insert(input.end(), ex.explanation.begin(), ex.explanation.end());
    std::vector<int> target(ex.explanation);
    target.push_back(kEosId);
    decoded = model.decode(input, encoded, ctx);
    token_logits = model.explanation_logits(decoded);
    parts.explanation = explanation_loss(token_logits, target);
    token_logits = num::slice_rows(token_logits, 0, T_len);
  } else {
    const auto fertility =
        target_fertility(static_cast<int>(ex.input.size()), T_len, mc.max_fertility, ex.alignment);
    const auto copied = model::copy_by_fertility(ex.input, fertility);
    decoded = model.decode(copied, encoded, ctx);
    token_logits = model.explanation_logits(decoded);
    parts.explanation = explanation_loss(token_logits, ex.explanation);
    parts.fertility = fertility_loss(model.predict_fertility(encoded).logits, fertility);
  }
  parts.label = label_loss(model.label_logits(decoded), ex.label);
  if (config.weights.lm > 0.0) {
    if (lm == nullptr) raise(ErrorCode::kInvalidArgument, "a fluency weight above zero needs a language model");
    parts.lm = lm_fluency_loss(num::softmax(token_logits, -1), *lm);
  }
  return parts;
}

namespace {

void check_regime(const std::vector<data::Example>& dataset, const TrainConfig& config) {
  if (dataset.empty()) raise(ErrorCode::kEmptyInput, "training set is empty");
  for (const auto& ex : dataset) {
    auto fail = [&](const std::string& what) {
      raise(ErrorCode::kRegimeDataMismatch, "record '" + ex.id + "' " + what + " (regime " + to_string(config.regime) + ")");
    };
    if (!ex.label) fail("has no label");
    if (!config.use_explanation_targets) continue;
    if (!ex.explanation) fail("has no explanation");
    if (config.regime == Regime::kFull && ex.provenance != data::Provenance::kHuman) fail("is not human-annotated");
    if (config.regime == Regime::kUnsup && ex.provenance != data::Provenance::kPseudo) fail("has no pseudo explanation");
  }
}

}  // namespace

TrainResult train(model::CnatModel<float>& model, const std::vector<data::Example>& dataset, const data::Vocab& vocab,
                  const TrainConfig& config, const model::LanguageModel<float>* lm, const EvalHook& hook) {
  if (config.steps < 1) raise(ErrorCode::kInvalidArgument, "step budget must be at least 1");
  if (config.batch_size < 1) raise(ErrorCode::kInvalidArgument, "batch size must be at least 1");
  config.weights.validate();
  if (vocab.size() != model.config().vocab_size) {
    raise(ErrorCode::kVocabMismatch, "vocabulary has " + std::to_string(vocab.size()) + " tokens, model expects " +
                                         std::to_string(model.config().vocab_size));
  }
  check_regime(dataset, config);

  std::optional<model::LanguageModel<float>> frozen;
  if (config.weights.lm > 0.0) {
    if (lm == nullptr) raise(ErrorCode::kInvalidArgument, "a fluency weight above zero needs a language model");
    if (lm->config().vocab_size != model.config().vocab_size) {
      raise(ErrorCode::kVocabMismatch, "language model vocabulary differs from the classifier's");
    }
    frozen.emplace(lm->clone());
    frozen->freeze();
  }
  const model::LanguageModel<float>* lm_ptr = frozen ? &*frozen : nullptr;

  std::vector<PreparedExample> prepared;
  prepared.reserve(dataset.size());
  for (const auto& ex : dataset) prepared.push_back(prepare_example(ex, vocab));

  num::Rng rng(config.seed);
  num::Rng dropout_rng = rng.fork();
  num::AdamState<float> adam(config.adam);
  auto& params = model.parameters();

  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t cursor = 0;

  const auto n_eval = std::min<std::size_t>(prepared.size(), static_cast<std::size_t>(std::max(0, config.eval_loss_examples)));
  auto eval_loss = [&]() {
    if (n_eval == 0) return 0.0;
    num::NoGradGuard guard;
    auto ctx = model::ForwardContext::inference();
    double acc = 0;
    for (std::size_t i = 0; i < n_eval; ++i) {
      acc += total_loss(compute_losses(model, prepared[i], config, lm_ptr, ctx), config.weights).item();
    }
    return acc / static_cast<double>(n_eval);
  };

  TrainResult result;
  HistoryRecord pending;
  int pending_steps = 0;
  for (int step = 1; step <= config.steps; ++step) {
    params.zero_grad();
    model::ForwardContext ctx{true, model.config().dropout, &dropout_rng};
    const float inv_batch = 1.0f / static_cast<float>(config.batch_size);
    for (int b = 0; b < config.batch_size; ++b) {
      if (cursor == order.size()) {
        rng.shuffle(order);
        cursor = 0;
      }
      const auto& ex = prepared[order[cursor++]];
      auto parts = compute_losses(model, ex, config, lm_ptr, ctx);
      auto loss = total_loss(parts, config.weights);
      num::backward(num::scale(loss, inv_batch));
      pending.total += loss.item() * inv_batch;
      pending.label += parts.label.item() * inv_batch;
      if (parts.explanation.defined()) pending.explanation += parts.explanation.item() * inv_batch;
      if (parts.fertility.defined()) pending.fertility += parts.fertility.item() * inv_batch;
      if (parts.lm.defined()) pending.lm += parts.lm.item() * inv_batch;
    }
    pending.grad_norm += num::clip_grad_norm<float>(params.vars(), config.clip_norm);
    num::adam_step<float>(params.vars(), adam);
    ++pending_steps;

    if (step % config.eval_every == 0 || step == config.steps) {
      const double k = pending_steps;
      pending.step = step;
      pending.total /= k;
      pending.label /= k;
      pending.explanation /= k;
      pending.fertility /= k;
      pending.lm /= k;
      pending.grad_norm /= k;
      pending.eval_total = eval_loss();
      if (hook) pending.metrics = hook(model, step);
      result.history.push_back(pending);
      pending = HistoryRecord{};
      pending_steps = 0;
    }
  }
  params.zero_grad();
  return result;
}

std::string history_record_to_json(const HistoryRecord& r) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["total"] = r.total;
  j["label"] = r.label;
  j["explanation"] = r.explanation;
  j["fertility"] = r.fertility;
  j["lm"] = r.lm;
  j["grad_norm"] = r.grad_norm;
  j["eval_total"] = r.eval_total;
  for (const auto& [k, v] : r.metrics) j[k] = v;
  return j.dump();
}

void write_history(std::ostream& out, const std::vector<HistoryRecord>& history) {
  for (const auto& r : history) out << history_record_to_json(r) << '\n';
}

template LossParts<float> compute_losses<float>(const model::CnatModel<float>&, const PreparedExample&,
                                                const TrainConfig&, const model::LanguageModel<float>*,
                                                model::ForwardContext&);
template LossParts<double> compute_losses<double>(const model::CnatModel<double>&, const PreparedExample&,
                                                  const TrainConfig&, const model::LanguageModel<double>*,
                                                  model::ForwardContext&);

}  // namespace cnat::training
