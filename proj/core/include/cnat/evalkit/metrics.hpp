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

#include <span>
#include <string>
#include <vector>

namespace cnat::evalkit {

using Sentence = std::vector<std::string>;

/// 100 * matches / total. Raises EmptyEval / LengthMismatch.
double accuracy(std::span<const int> predictions, std::span<const int> golds);

/// Corpus BLEU-4 with brevity penalty and no smoothing, in [0, 100]. An
/// order with no candidate n-grams at all counts as precision 1; an order
/// with candidate n-grams but no matches gives 0. Raises EmptyEval.
double bleu(const std::vector<Sentence>& candidates, const std::vector<Sentence>& references);
double bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references);

/// exp(mean per-token NLL) from per-sentence token log-probabilities.
/// Raises EmptyEval when there are no tokens.
double perplexity_from_log_probs(const std::vector<std::vector<double>>& token_log_probs);

/// Mean over explanations of the share of their distinct bigrams already
/// seen in earlier explanations (dataset order); sentences without bigrams
/// score 0. Lower is more diverse. Returns 0 for fewer than two sentences.
double inter_rep(const std::vector<Sentence>& explanations);
double inter_rep(const std::vector<std::string>& explanations);

/// 100 * share of items where the judge's label equals the model's label.
double rationality(std::span<const int> judge_labels, std::span<const int> predicted_labels);

}  // namespace cnat::evalkit
