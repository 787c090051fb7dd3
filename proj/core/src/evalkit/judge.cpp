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

#include "cnat/evalkit/judge.hpp"

#include <algorithm>
#include <cmath>

#include "cnat/error.hpp"
#include "cnat/model/checkpoint.hpp"
#include "cnat/numcore/adam.hpp"
#include "cnat/tokens.hpp"

namespace cnat::evalkit {

JudgeClassifier::JudgeClassifier(const model::ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  num::Rng rng(seed);
  const int d = config_.d_model;
  positions_ = model::sinusoidal_positions<float>(config_.max_length, d);
  num::Tensor<float> table({config_.vocab_size, d});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& v : table.data()) v = static_cast<float>(rng.normal() * stddev);
  std::fill_n(table.row(kPadId).begin(), d, 0.0f);
  embedding_ = params_.add("judge.embedding", std::move(table));
  for (int l = 0; l < config_.encoder_layers; ++l) {
    layers_.emplace_back(params_, "judge." + std::to_string(l), d, config_.heads, config_.ffn_width, rng);
  }
  output_ = model::Linear<float>(params_, "judge.output", d, config_.num_labels, rng);
}

std::vector<int> JudgeClassifier::pack(std::span<const int> input, std::span<const int> explanation) const {
  std::vector<int> out(input.begin(), input.end());
  if (static_cast<int>(out.size()) >= config_.max_length) {
    raise(ErrorCode::kLengthOverflow, "judge input exceeds max length " + std::to_string(config_.max_length));
  }
  out.push_back(kSepId);
  for (int id : explanation) {
    if (static_cast<int>(out.size()) >= config_.max_length) break;
    out.push_back(id);
  }
  return out;
}

num::Var<float> JudgeClassifier::logits(std::span<const int> packed, model::ForwardContext& ctx) const {
  if (packed.empty()) raise(ErrorCode::kEmptyInput, "empty judge input");
  auto x = model::embed_tokens(embedding_, packed, positions_, kPadId);
  if (ctx.training && ctx.rng) x = num::dropout(x, ctx.dropout, *ctx.rng, true);
  for (const auto& layer : layers_) x = layer(x, ctx);
  auto pooled = num::reshape(num::mean(x, 0), {1, config_.d_model});
  return output_(pooled);
}

std::vector<double> JudgeClassifier::predict_probs(std::span<const int> input, std::span<const int> explanation) const {
  num::NoGradGuard guard;
  auto ctx = model::ForwardContext::inference();
  const auto packed = pack(input, explanation);
  auto p = num::softmax(logits(packed, ctx), -1);
  return {p.value().data().begin(), p.value().data().end()};
}

int JudgeClassifier::predict(std::span<const int> input, std::span<const int> explanation) const {
  const auto p = predict_probs(input, explanation);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

JudgeClassifier train_judge(const std::vector<data::Example>& examples, const data::Vocab& vocab,
                            const JudgeTrainConfig& config, int num_labels) {
  struct Pair {
    std::vector<int> input, explanation;
    int label;
  };
  std::vector<Pair> pairs;
  for (const auto& ex : examples) {
    if (!ex.label || !ex.explanation) continue;
    pairs.push_back({data::encode_input(ex, vocab), vocab.tokenize(*ex.explanation), *ex.label});
  }
  if (pairs.empty()) raise(ErrorCode::kEmptyInput, "no labelled explanations to train the judge on");

  model::ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.d_model = config.d_model;
  mc.heads = config.heads;
  mc.encoder_layers = config.layers;
  mc.decoder_layers = 1;  // unused by the judge
  mc.ffn_width = config.ffn_width;
  mc.num_labels = num_labels;
  mc.dropout = 0.1;
  JudgeClassifier judge(mc, config.seed);

  num::Rng rng(config.seed ^ 0x5eedull);
  num::Rng dropout_rng = rng.fork();
  num::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  num::AdamState<float> adam(adam_cfg);
  auto& params = judge.parameters();
  const int vocab_words = vocab.size() - kNumSpecialTokens;

  for (int step = 0; step < config.steps; ++step) {
    params.zero_grad();
    model::ForwardContext ctx{true, mc.dropout, &dropout_rng};
    for (int b = 0; b < config.batch_size; ++b) {
      const auto& p = pairs[static_cast<std::size_t>(rng.uniform_int(pairs.size()))];
      const double draw = rng.uniform();
      const bool noisy = vocab_words > 0 && draw < config.noise_rate;
      const bool restate = !noisy && draw < config.noise_rate + config.restate_rate;
      std::vector<int> expl = p.explanation;
      if (noisy) {
        for (auto& id : expl) id = kNumSpecialTokens + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(vocab_words)));
      } else if (restate) {
        // Input words in either segment order, some replaced by random words.
        auto sep = std::find(p.input.begin(), p.input.end(), kSepId);
        std::vector<int> first(p.input.begin(), sep);
        std::vector<int> second(sep == p.input.end() ? sep : sep + 1, p.input.end());
        if (rng.bernoulli(0.5)) std::swap(first, second);
        expl = first;
        expl.insert(expl.end(), second.begin(), second.end());
        for (auto& id : expl) {
          if (vocab_words > 0 && rng.bernoulli(config.restate_substitution)) {
            id = kNumSpecialTokens + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(vocab_words)));
          }
        }
      }
      auto logits = judge.logits(judge.pack(p.input, expl), ctx);
      num::Var<float> loss;
      if (noisy) {
        loss = num::scale(num::mean(num::log_softmax(logits)), -1.0f);
      } else {
        const int target[1] = {p.label};
        loss = num::cross_entropy_logits(logits, std::span<const int>(target, 1));
      }
      num::backward(num::scale(loss, 1.0f / static_cast<float>(config.batch_size)));
    }
    num::clip_grad_norm<float>(params.vars(), 1.0);
    num::adam_step<float>(params.vars(), adam);
  }
  params.zero_grad();
  return judge;
}

void save_judge(const std::string& path, const JudgeClassifier& judge) {
  model::write_checkpoint_file(path, "judge", judge.config(), judge.parameters());
}

JudgeClassifier load_judge(const std::string& path) {
  const auto ck = model::read_checkpoint_file(path);
  if (ck.kind != "judge") raise(ErrorCode::kInvalidArgument, path + " holds a '" + ck.kind + "' checkpoint, not a judge");
  JudgeClassifier judge(ck.config, 0);
  model::restore_parameters(judge.parameters(), ck);
  return judge;
}

}  // namespace cnat::evalkit
