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

#include <cmath>

#include "cnat/evalkit/bench.hpp"
#include "cnat/evalkit/metrics.hpp"
#include "cnat/model/language_model.hpp"
#include "cnat/training/lm_trainer.hpp"
#include "harness.hpp"

namespace acceptance {
namespace {

namespace ek = cnat::evalkit;

Outcome metric_self_tests() {
  std::vector<std::string> checks;
  bool pass = true;
  auto record = [&](bool ok, const std::string& what) {
    pass = pass && ok;
    checks.push_back(std::string(ok ? "ok " : "BAD ") + what);
  };

  const std::vector<std::string> xs{"the red cat sits on the mat", "a man is in the park today",
                                    "the dog and the owner are married"};
  const double self = ek::bleu(xs, xs);
  record(self == 100.0, format("bleu(x,x)=%.6f", self));

  // 1-gram 7/8 (clipped "the" x2), 2-gram 4/7, 3-gram 2/6, 4-gram 1/5;
  // candidate 8 tokens against reference 9.
  const double hand = 100.0 * std::exp(1.0 - 9.0 / 8.0) * std::pow(7.0 / 8 * 4.0 / 7 * 2.0 / 6 * 1.0 / 5, 0.25);
  const double got = ek::bleu(std::vector<std::string>{"the quick brown fox jumps over the dog"},
                              std::vector<std::string>{"the quick brown fox jumped over the lazy dog"});
  record(std::abs(got - hand) <= 1e-2, format("hand BLEU %.4f vs %.4f", got, hand));

  cnat::model::ModelConfig lm_config;
  lm_config.vocab_size = 37;
  lm_config.d_model = 16;
  lm_config.heads = 2;
  lm_config.decoder_layers = 1;
  lm_config.ffn_width = 32;
  lm_config.max_length = 32;
  cnat::model::LanguageModel<double> uniform(lm_config, 5);
  uniform.output_head().weight.node()->value.fill(0.0);
  uniform.output_head().bias.node()->value.fill(0.0);
  cnat::num::Rng rng(9);
  std::vector<std::vector<double>> log_probs;
  for (int s = 0; s < 20; ++s) {
    std::vector<int> sentence;
    const int len = 1 + static_cast<int>(rng.uniform_int(12));
    for (int i = 0; i < len; ++i) sentence.push_back(static_cast<int>(rng.uniform_int(37)));
    log_probs.push_back(uniform.token_log_probs(sentence));
  }
  const double ppl = ek::perplexity_from_log_probs(log_probs);
  record(std::abs(ppl - 37.0) <= 1e-12 * 37.0, format("uniform-LM PPL %.15g (V=37)", ppl));

  for (int n : {2, 3, 7}) {
    std::vector<std::string> same(static_cast<std::size_t>(n), "the cat cannot be both red and blue");
    const double ir = ek::inter_rep(same);
    record(ir == static_cast<double>(n - 1) / n, format("inter_rep(%d identical)=%.17g", n, ir));
  }
  const double distinct = ek::inter_rep(std::vector<std::string>{"a b c", "d e f", "g h i j"});
  record(distinct == 0.0, format("inter_rep(disjoint)=%g", distinct));

  cnat::model::ModelConfig config = cnat::model::ModelConfig::desk(60, 3);
  config.dropout = 0.0;
  cnat::model::CnatModel<float> model(config, 3);
  std::vector<std::vector<int>> inputs;
  for (int i = 0; i < 8; ++i) {
    std::vector<int> ids;
    for (int j = 0; j < 12; ++j) ids.push_back(5 + static_cast<int>(rng.uniform_int(55)));
    inputs.push_back(ids);
  }
  const ek::DecodeFn fn = [&](std::size_t i) { return static_cast<int>(model.generate(inputs[i]).explanation.size()); };
  ek::BenchOptions options;
  options.repeats = 5;
  const auto r = ek::bench_pair(fn, "a", fn, "b", inputs.size(), options);
  record(r.speedup >= 0.9 && r.speedup <= 1.1, format("identical-callable speedup %.3f", r.speedup));

  std::string detail;
  for (const auto& c : checks) detail += (detail.empty() ? "" : "; ") + c;
  return {pass, detail};
}

const Register reg(9, "metric self-tests", metric_self_tests);

}  // namespace
}  // namespace acceptance
