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

#include "cnat/training/losses.hpp"

#include <cmath>
#include <string>

#include "cnat/error.hpp"
#include "cnat/tokens.hpp"

namespace cnat::training {

void LossWeights::validate() const {
  if (explanation < 0 || fertility < 0 || lm < 0) {
    raise(ErrorCode::kInvalidArgument, "loss weights must be non-negative");
  }
}

template <typename T>
Var<T> label_loss(const Var<T>& label_logits, int gold_label) {
  const int target[1] = {gold_label};
  return num::cross_entropy_logits(label_logits, std::span<const int>(target, 1));
}

template <typename T>
Var<T> explanation_loss(const Var<T>& token_logits, std::span<const int> gold_tokens) {
  if (token_logits.rows() != static_cast<int>(gold_tokens.size())) {
    raise(ErrorCode::kLengthMismatch, "explanation has " + std::to_string(gold_tokens.size()) +
                                          " tokens but the decoder produced " + std::to_string(token_logits.rows()));
  }
  return num::cross_entropy_logits(token_logits, gold_tokens, kPadId);
}

template <typename T>
Var<T> fertility_loss(const Var<T>& fertility_logits, std::span<const int> target_fertility) {
  const int classes = fertility_logits.cols();
  for (int f : target_fertility) {
    if (f < 0 || f >= classes) {
      raise(ErrorCode::kFertilityOverflow,
            "fertility target " + std::to_string(f) + " outside 0.." + std::to_string(classes - 1));
    }
  }
  return num::cross_entropy_logits(fertility_logits, target_fertility);
}

template <typename T>
Var<T> lm_fluency_loss(const Var<T>& token_probs, const model::LanguageModel<T>& lm) {
  if (token_probs.cols() != lm.config().vocab_size) {
    raise(ErrorCode::kVocabMismatch, "distribution width " + std::to_string(token_probs.cols()) +
                                         " != language model vocabulary " + std::to_string(lm.config().vocab_size));
  }
  auto ctx = model::ForwardContext::inference();
  auto ll = lm.log_likelihood_soft(token_probs, ctx);
  return num::scale(ll, static_cast<T>(-1.0 / token_probs.rows()));
}

template <typename T>
Var<T> total_loss(const LossParts<T>& parts, const LossWeights& weights) {
  auto check = [](const Var<T>& v, const char* name) {
    if (v.defined() && !std::isfinite(static_cast<double>(v.item()))) {
      raise(ErrorCode::kNonFiniteLoss, std::string(name) + " loss is not finite");
    }
  };
  check(parts.label, "label");
  check(parts.explanation, "explanation");
  check(parts.fertility, "fertility");
  check(parts.lm, "lm");
  Var<T> total = parts.label;
  auto accumulate = [&](const Var<T>& part, double w) {
    if (!part.defined() || w == 0.0) return;
    total = num::add(total, num::scale(part, static_cast<T>(w)));
  };
  accumulate(parts.explanation, weights.explanation);
  accumulate(parts.fertility, weights.fertility);
  accumulate(parts.lm, weights.lm);
  return total;
}

double total_loss(double label, double explanation, double fertility, double lm, const LossWeights& weights) {
  for (double v : {label, explanation, fertility, lm}) {
    if (!std::isfinite(v)) raise(ErrorCode::kNonFiniteLoss, "loss part is not finite");
  }
  return label + weights.explanation * explanation + weights.fertility * fertility + weights.lm * lm;
}

#define CNAT_INSTANTIATE(T)                                                                            \
  template Var<T> label_loss<T>(const Var<T>&, int);                                                 \
  template Var<T> explanation_loss<T>(const Var<T>&, std::span<const int>);                          \
  template Var<T> fertility_loss<T>(const Var<T>&, std::span<const int>);                            \
  template Var<T> lm_fluency_loss<T>(const Var<T>&, const model::LanguageModel<T>&);                  \
  template Var<T> total_loss<T>(const LossParts<T>&, const LossWeights&);

CNAT_INSTANTIATE(float)
CNAT_INSTANTIATE(double)

}  // namespace cnat::training
