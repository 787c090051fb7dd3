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

#include "cnat/evalkit/metrics.hpp"

#include <array>
#include <cmath>
#include <map>
#include <set>

#include "cnat/data/vocab.hpp"
#include "cnat/error.hpp"

namespace cnat::evalkit {
namespace {

std::vector<Sentence> split_all(const std::vector<std::string>& texts) {
  std::vector<Sentence> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(data::tokenize_words(t));
  return out;
}

std::map<std::vector<std::string>, int> ngram_counts(const Sentence& s, std::size_t n) {
  std::map<std::vector<std::string>, int> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[Sentence(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i + n))];
  return counts;
}

}  // namespace

double accuracy(std::span<const int> predictions, std::span<const int> golds) {
  if (predictions.empty()) raise(ErrorCode::kEmptyEval, "no predictions to score");
  if (predictions.size() != golds.size()) raise(ErrorCode::kLengthMismatch, "predictions and golds differ in length");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == golds[i];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double bleu(const std::vector<Sentence>& candidates, const std::vector<Sentence>& references) {
  if (candidates.empty()) raise(ErrorCode::kEmptyEval, "empty candidate corpus");
  if (candidates.size() != references.size()) raise(ErrorCode::kLengthMismatch, "corpora differ in size");
  std::array<double, 4> matched{}, total{};
  double cand_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    cand_len += static_cast<double>(candidates[i].size());
    ref_len += static_cast<double>(references[i].size());
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto c = ngram_counts(candidates[i], n);
      const auto r = ngram_counts(references[i], n);
      for (const auto& [gram, count] : c) {
        total[n - 1] += count;
        auto it = r.find(gram);
        if (it != r.end()) matched[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (cand_len == 0) return 0.0;
  double log_precision = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (total[n] == 0) continue;
    if (matched[n] == 0) return 0.0;
    log_precision += std::log(matched[n] / total[n]);
  }
  const double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / cand_len);
  return 100.0 * bp * std::exp(log_precision / 4.0);
}

double bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references) {
  return bleu(split_all(candidates), split_all(references));
}

double perplexity_from_log_probs(const std::vector<std::vector<double>>& token_log_probs) {
  double nll = 0;
  double tokens = 0;
  for (const auto& sentence : token_log_probs) {
    for (double lp : sentence) nll -= lp;
    tokens += static_cast<double>(sentence.size());
  }
  if (tokens == 0) raise(ErrorCode::kEmptyEval, "no tokens to score");
  return std::exp(nll / tokens);
}

double inter_rep(const std::vector<Sentence>& explanations) {
  if (explanations.size() < 2) return 0.0;
  std::set<std::pair<std::string, std::string>> seen;
  double acc = 0;
  for (const auto& s : explanations) {
    std::set<std::pair<std::string, std::string>> grams;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) grams.emplace(s[i], s[i + 1]);
    if (!grams.empty()) {
      std::size_t repeated = 0;
      for (const auto& g : grams) repeated += seen.contains(g);
      acc += static_cast<double>(repeated) / static_cast<double>(grams.size());
    }
    seen.insert(grams.begin(), grams.end());
  }
  return acc / static_cast<double>(explanations.size());
}

double inter_rep(const std::vector<std::string>& explanations) { return inter_rep(split_all(explanations)); }

double rationality(std::span<const int> judge_labels, std::span<const int> predicted_labels) {
  return accuracy(judge_labels, predicted_labels);
}

}  // namespace cnat::evalkit
