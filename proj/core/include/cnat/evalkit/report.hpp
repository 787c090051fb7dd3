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

#include <optional>
#include <string>
#include <vector>

#include "cnat/data/example.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/evalkit/judge.hpp"
#include "cnat/model/cnat_model.hpp"
#include "cnat/model/language_model.hpp"

namespace cnat::evalkit {

struct EvalReport {
  int examples = 0;
  double accuracy = 0;
  double ne_accuracy = 0;
  std::optional<double> bleu;         // when gold explanations exist
  std::optional<double> perplexity;   // when a scorer LM is given
  double inter_rep = 0;
  std::optional<double> rationality;  // when a judge is given
  double mean_latency_ns = 0;
  std::optional<double> speedup;
  std::string baseline;
};

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

/// Model outputs behind a report, in dataset order.
struct Generations {
  std::vector<int> labels;
  std::vector<int> ne_labels;
  std::vector<std::vector<int>> explanations;
  std::vector<double> latency_ns;
};

Generations generate_all(const model::CnatModel<float>& model, const std::vector<data::Example>& examples,
                         const data::Vocab& vocab);

/// Acc, NE-Acc, BLEU against gold explanations, scorer perplexity,
/// Inter-Rep, Rationality and mean latency. Raises EmptyEval on an empty set
/// and when an example has no gold label.
EvalReport evaluate_model(const model::CnatModel<float>& model, const std::vector<data::Example>& examples,
                          const data::Vocab& vocab, const model::LanguageModel<float>* scorer = nullptr,
                          const JudgeClassifier* judge = nullptr, Generations* generations = nullptr);

/// Perplexity of token sentences under `scorer`; ids outside its vocabulary
/// count as UNK and empty sentences are skipped.
double scorer_perplexity(const model::LanguageModel<float>& scorer, const std::vector<std::vector<int>>& sentences);

}  // namespace cnat::evalkit
