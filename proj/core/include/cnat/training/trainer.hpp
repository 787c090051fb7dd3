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
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cnat/data/example.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/model/cnat_model.hpp"
#include "cnat/model/language_model.hpp"
#include "cnat/numcore/adam.hpp"
#include "cnat/training/losses.hpp"

namespace cnat::training {

enum class Regime { kFull, kWeak, kUnsup };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& text);

struct TrainConfig {
  Regime regime = Regime::kFull;
  LossWeights weights;
  int batch_size = 16;
  int steps = 1000;
  std::uint64_t seed = 0;
  num::AdamConfig adam;
  double clip_norm = 1.0;
  /// A history record (and the eval hook) every this many steps.
  int eval_every = 20;
  /// Leading training records whose inference-mode loss is tracked.
  int eval_loss_examples = 64;
  /// False drops the explanation and fertility terms: the decoder reads the
  /// input copied once per token, and only the label and (when a language
  /// model is given) fluency terms remain.
  bool use_explanation_targets = true;
};

/// Tokenized training record.
struct PreparedExample {
  std::vector<int> input;
  std::vector<int> explanation;
  std::vector<int> alignment;  // empty unless it covers every explanation token
  int label = -1;
};

PreparedExample prepare_example(const data::Example& example, const data::Vocab& vocab);

/// Loss terms of one record under teacher forcing. Non-autoregressive
/// models decode the input copied by target fertilities; autoregressive
/// models decode [BOS] + E against E + [EOS]. `lm` may be null when the
/// fluency weight is zero.
template <typename T>
LossParts<T> compute_losses(const model::CnatModel<T>& model, const PreparedExample& example,
                            const TrainConfig& config, const model::LanguageModel<T>* lm,
                            model::ForwardContext& ctx);

struct HistoryRecord {
  int step = 0;
  // Means over the steps since the previous record.
  double total = 0, label = 0, explanation = 0, fertility = 0, lm = 0, grad_norm = 0;
  /// Inference-mode total loss over the tracked training records.
  double eval_total = 0;
  std::map<std::string, double> metrics;
};

using EvalHook = std::function<std::map<std::string, double>(const model::CnatModel<float>& model, int step)>;

struct TrainResult {
  std::vector<HistoryRecord> history;
};

/// Seeded minibatch loop: losses, backward, gradient clipping, Adam. Raises
/// RegimeDataMismatch when a record lacks what the regime needs and
/// VocabMismatch when the vocabulary and model disagree.
TrainResult train(model::CnatModel<float>& model, const std::vector<data::Example>& dataset,
                  const data::Vocab& vocab, const TrainConfig& config,
                  const model::LanguageModel<float>* lm = nullptr, const EvalHook& hook = {});

std::string history_record_to_json(const HistoryRecord& record);
void write_history(std::ostream& out, const std::vector<HistoryRecord>& history);

}  // namespace cnat::training
