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

#include "cnat/weaksup/pseudo.hpp"

#include <cstdio>

#include "cnat/error.hpp"

namespace cnat::weaksup {

std::optional<std::string> make_pseudo_explanation(const data::Example& example, std::span<const int> votes,
                                                   std::span<const LabelingFunction> lfs,
                                                   std::span<const double> weights, int num_labels) {
  if (votes.size() != lfs.size() || weights.size() != lfs.size()) {
    raise(ErrorCode::kShapeMismatch, "votes, labeling functions and weights differ in length");
  }
  const int label = aggregate(votes, weights, num_labels);
  if (label == kAbstain) return std::nullopt;
  int chosen = -1;
  for (std::size_t m = 0; m < lfs.size(); ++m) {
    if (votes[m] != label) continue;
    if (chosen < 0 || weights[m] > weights[static_cast<std::size_t>(chosen)]) chosen = static_cast<int>(m);
  }
  const auto& lf = lfs[static_cast<std::size_t>(chosen)];
  return lf.explanation.instantiate(example, lf.rule);
}

CombinedDataset build_combined_dataset(const std::vector<data::Example>& annotated,
                                       const std::vector<data::Example>& unlabeled,
                                       std::span<const LabelingFunction> lfs, const LabelModelConfig& config) {
  CombinedDataset out;
  out.examples = annotated;
  out.unlabeled = static_cast<int>(unlabeled.size());
  if (lfs.empty() || unlabeled.empty()) return out;

  const auto votes = apply_lfs(std::span<const data::Example>(unlabeled), lfs);
  bool any_vote = false;
  for (const auto& row : votes) {
    for (int v : row) any_vote = any_vote || v != kAbstain;
  }
  if (!any_vote) return out;
  const auto model = learn_weights(votes, config);
  out.weights = model.weights;
  out.never_votes = model.never_votes;

  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    const int label = aggregate(votes[i], out.weights, config.num_labels);
    if (label == kAbstain) continue;
    ++out.covered;
    auto text = make_pseudo_explanation(unlabeled[i], votes[i], lfs, out.weights, config.num_labels);
    if (!text) {
      ++out.dropped;
      std::fprintf(stderr, "weak-label: dropped '%s' (template slot unfilled)\n", unlabeled[i].id.c_str());
      continue;
    }
    data::Example ex;
    ex.id = unlabeled[i].id;
    ex.segment_a = unlabeled[i].segment_a;
    ex.segment_b = unlabeled[i].segment_b;
    ex.label = label;
    ex.explanation = std::move(text);
    ex.provenance = data::Provenance::kPseudo;
    ex.alignment = data::align_explanation(ex);
    out.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace cnat::weaksup
