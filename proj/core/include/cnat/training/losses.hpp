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

#include "cnat/model/language_model.hpp"
#include "cnat/numcore/autodiff.hpp"

namespace cnat::training {

using num::Var;

/// Coefficients of the explanation, fertility and fluency terms. The label
/// term always has coefficient 1.
struct LossWeights {
  double explanation = 1.0;
  double fertility = 0.5;
  double lm = 0.1;

  /// Raises InvalidArgument on a negative weight.
  void validate() const;
};

template <typename T>
struct LossParts {
  Var<T> label;
  Var<T> explanation;  // undefined when not computed
  Var<T> fertility;    // undefined when not computed
  Var<T> lm;           // undefined when not computed
};

/// Cross-entropy of pooled label logits against the gold label.
template <typename T>
Var<T> label_loss(const Var<T>& label_logits, int gold_label);

/// Mean per-token cross-entropy of T x V logits; PAD targets are skipped.
/// Raises LengthMismatch when rows(logits) != |gold|.
template <typename T>
Var<T> explanation_loss(const Var<T>& token_logits, std::span<const int> gold_tokens);

/// Mean per-position cross-entropy over fertility classes. Raises
/// FertilityOverflow when a target exceeds the class range.
template <typename T>
Var<T> fertility_loss(const Var<T>& fertility_logits, std::span<const int> target_fertility);

/// -(1/T) times the frozen LM's log-likelihood of the soft sentence whose
/// position t embeds as P_t * E_LM. The LM runs without dropout. Raises
/// VocabMismatch.
template <typename T>
Var<T> lm_fluency_loss(const Var<T>& token_probs, const model::LanguageModel<T>& lm);

/// L_L + w_E L_E + w_F L_F + w_LM L_LM over the defined parts. Raises
/// NonFiniteLoss when any defined part is not finite.
template <typename T>
Var<T> total_loss(const LossParts<T>& parts, const LossWeights& weights);

/// Scalar form of total_loss().
double total_loss(double label, double explanation, double fertility, double lm, const LossWeights& weights);

}  // namespace cnat::training
