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
#include <vector>

#include "cnat/model/language_model.hpp"
#include "cnat/numcore/adam.hpp"

namespace cnat::training {

struct LmTrainConfig {
  int steps = 500;
  int batch_size = 16;
  std::uint64_t seed = 0;
  num::AdamConfig adam;
  double clip_norm = 1.0;
  int log_every = 50;
};

struct LmHistoryRecord {
  int step = 0;
  /// exp of the mean per-token negative log-likelihood over the steps since
  /// the previous record.
  double train_perplexity = 0;
};

/// Next-token training of `lm` on tokenized sentences (no BOS/EOS; the
/// model supplies BOS). Raises EmptyInput on an empty corpus.
std::vector<LmHistoryRecord> pretrain_lm(model::LanguageModel<float>& lm, const std::vector<std::vector<int>>& corpus,
                                         const LmTrainConfig& config);

/// exp(total NLL / total tokens) of `corpus` under `lm`.
double corpus_perplexity(const model::LanguageModel<float>& lm, const std::vector<std::vector<int>>& corpus);

}  // namespace cnat::training
