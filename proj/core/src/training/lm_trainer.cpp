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

#include "cnat/training/lm_trainer.hpp"

#include <cmath>
#include <numeric>

#include "cnat/error.hpp"

namespace cnat::training {

std::vector<LmHistoryRecord> pretrain_lm(model::LanguageModel<float>& lm, const std::vector<std::vector<int>>& corpus,
                                         const LmTrainConfig& config) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].empty()) usable.push_back(i);
  }
  if (usable.empty()) raise(ErrorCode::kEmptyInput, "language model corpus is empty");
  if (config.steps < 1 || config.batch_size < 1) raise(ErrorCode::kInvalidArgument, "steps and batch size must be positive");

  lm.unfreeze();
  num::Rng rng(config.seed);
  num::Rng dropout_rng = rng.fork();
  num::AdamState<float> adam(config.adam);
  auto& params = lm.parameters();
  rng.shuffle(usable);
  std::size_t cursor = 0;

  std::vector<LmHistoryRecord> history;
  double nll = 0;
  double tokens = 0;
  for (int step = 1; step <= config.steps; ++step) {
    params.zero_grad();
    model::ForwardContext ctx{true, lm.config().dropout, &dropout_rng};
    const float inv_batch = 1.0f / static_cast<float>(config.batch_size);
    for (int b = 0; b < config.batch_size; ++b) {
      if (cursor == usable.size()) {
        rng.shuffle(usable);
        cursor = 0;
      }
      const auto& sentence = corpus[usable[cursor++]];
      auto ll = lm.log_likelihood(sentence, ctx);
      const auto len = static_cast<float>(sentence.size());
      num::backward(num::scale(ll, -inv_batch / len));
      nll -= ll.item();
      tokens += len;
    }
    num::clip_grad_norm<float>(params.vars(), config.clip_norm);
    num::adam_step<float>(params.vars(), adam);
    if (step % config.log_every == 0 || step == config.steps) {
      history.push_back({step, std::exp(nll / tokens)});
      nll = tokens = 0;
    }
  }
  params.zero_grad();
  lm.freeze();
  return history;
}

double corpus_perplexity(const model::LanguageModel<float>& lm, const std::vector<std::vector<int>>& corpus) {
  double nll = 0;
  double tokens = 0;
  for (const auto& sentence : corpus) {
    if (sentence.empty()) continue;
    for (double lp : lm.token_log_probs(sentence)) nll -= lp;
    tokens += static_cast<double>(sentence.size());
  }
  if (tokens == 0) raise(ErrorCode::kEmptyEval, "no tokens to score");
  return std::exp(nll / tokens);
}

}  // namespace cnat::training
