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


#include "cnat/evalkit/report.hpp"
#include "cnat/model/language_model.hpp"
#include "cnat/training/lm_trainer.hpp"
#include "harness.hpp"

namespace acceptance {
namespace {

using cnat::data::Example;
using cnat::data::SyntheticTaskConfig;

std::vector<std::vector<int>> explanations_of(const std::vector<Example>& examples, const cnat::data::Vocab& vocab) {
  std::vector<std::vector<int>> corpus;
  for (const auto& ex : examples) corpus.push_back(vocab.tokenize(*ex.explanation));
  return corpus;
}

cnat::model::ModelConfig small_lm_config(const cnat::data::Vocab& vocab) {
  auto config = desk_config(vocab, cnat::data::TaskFamily::kNli);
  config.d_model = 64;
  config.decoder_layers = 2;
  config.ffn_width = 128;
  config.dropout = 0.0;
  return config;
}

// Held-out scorer perplexity of generations from models trained with the
// given fluency weights, everything else matched.
std::pair<double, double> perplexity_pair(std::uint64_t seed) {
  auto splits = cnat::data::generate_synthetic(SyntheticTaskConfig::nli(seed));
  // The scorer never sees this task's training text.
  const auto scorer_source = cnat::data::generate_synthetic(SyntheticTaskConfig::nli(seed + 1000));
  const std::vector<Example> train(splits.train.begin(), splits.train.begin() + 512);
  const auto vocab = cnat::data::Vocab::build(splits.train);

  cnat::training::LmTrainConfig lm_config;
  lm_config.steps = 400;
  lm_config.adam.learning_rate = 1e-3;
  lm_config.seed = seed;
  cnat::model::LanguageModel<float> discriminator(small_lm_config(vocab), seed);
  cnat::training::pretrain_lm(discriminator, explanations_of(splits.train, vocab), lm_config);
  lm_config.seed = seed + 77;
  cnat::model::LanguageModel<float> scorer(small_lm_config(vocab), seed + 77);
  cnat::training::pretrain_lm(scorer, explanations_of(scorer_source.train, vocab), lm_config);

  double ppl[2] = {0, 0};
  const double weights[2] = {0.1, 0.0};
  for (int arm = 0; arm < 2; ++arm) {
    cnat::model::CnatModel<float> model(desk_config(vocab, cnat::data::TaskFamily::kNli), seed);
    cnat::training::TrainConfig config;
    config.steps = 800;
    config.adam.learning_rate = 1e-3;
    config.weights.lm = weights[arm];
    config.seed = seed;
    config.eval_every = 100;
    cnat::training::train(model, train, vocab, config, weights[arm] > 0 ? &discriminator : nullptr);
    ppl[arm] = *cnat::evalkit::evaluate_model(model, splits.test, vocab, &scorer).perplexity;
    note(format("lm direction seed %llu lambda %.1f: ppl %.3f", static_cast<unsigned long long>(seed), weights[arm],
                ppl[arm]));
  }
  return {ppl[0], ppl[1]};
}

Outcome lm_direction() {
  bool pass = true;
  std::string detail = "scorer PPL lambda=0.1 vs 0:";
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto [with_lm, without_lm] = perplexity_pair(seed);
    pass = pass && with_lm < without_lm;
    detail += format(" seed %llu %.3f vs %.3f%s", static_cast<unsigned long long>(seed), with_lm, without_lm,
                     with_lm < without_lm ? "" : " (not lower)");
  }
  return {pass, detail};
}

const Register reg(4, "LM discriminator lowers scorer perplexity", lm_direction);

}  // namespace
}  // namespace acceptance
