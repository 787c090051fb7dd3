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
#include <span>
#include <string>
#include <vector>

#include "cnat/data/example.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/model/config.hpp"
#include "cnat/model/layers.hpp"

namespace cnat::evalkit {

/// Rationality judge: a bidirectional encoder over [input SEP explanation],
/// mean-pooled, then a linear layer over labels. Uses vocab_size, d_model,
/// heads, encoder_layers, ffn_width, max_length and num_labels of its config.
class JudgeClassifier {
 public:
  JudgeClassifier(const model::ModelConfig& config, std::uint64_t seed);
  JudgeClassifier(JudgeClassifier&&) noexcept = default;
  JudgeClassifier& operator=(JudgeClassifier&&) noexcept = default;

  const model::ModelConfig& config() const { return config_; }
  model::ParameterSet<float>& parameters() { return params_; }
  const model::ParameterSet<float>& parameters() const { return params_; }

  /// input, SEP, explanation; the explanation is cut to fit max_length.
  std::vector<int> pack(std::span<const int> input, std::span<const int> explanation) const;
  num::Var<float> logits(std::span<const int> packed, model::ForwardContext& ctx) const;
  std::vector<double> predict_probs(std::span<const int> input, std::span<const int> explanation) const;
  int predict(std::span<const int> input, std::span<const int> explanation) const;

 private:
  model::ModelConfig config_;
  model::ParameterSet<float> params_;
  num::Tensor<float> positions_;
  num::Var<float> embedding_;
  std::vector<model::SelfAttentionLayer<float>> layers_;
  model::Linear<float> output_;
};

struct JudgeTrainConfig {
  int d_model = 64;
  int heads = 4;
  int layers = 2;
  int ffn_width = 128;
  int steps = 6000;
  int batch_size = 16;
  double learning_rate = 1e-3;
  /// Share of training pairs whose explanation is replaced by random
  /// tokens; those pairs are trained toward the uniform label distribution.
  double noise_rate = 0.25;
  /// Share of training pairs whose explanation restates the input (segments
  /// in random order, each word replaced by a random word with probability
  /// restate_substitution), kept with the gold label.
  double restate_rate = 0.4;
  double restate_substitution = 0.15;
  std::uint64_t seed = 0;
};

/// Trains on (input, explanation) -> label for records carrying both.
/// Raises EmptyInput when there are none.
JudgeClassifier train_judge(const std::vector<data::Example>& examples, const data::Vocab& vocab,
                            const JudgeTrainConfig& config, int num_labels);

void save_judge(const std::string& path, const JudgeClassifier& judge);
JudgeClassifier load_judge(const std::string& path);

}  // namespace cnat::evalkit
