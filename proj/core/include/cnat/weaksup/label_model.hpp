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
#include <vector>

#include "cnat/weaksup/rules.hpp"

namespace cnat::weaksup {

struct LabelModelConfig {
  int num_labels = 2;
  double initial_weight = 0.7;
  /// Weights are searched in [min_weight, max_weight]. A floor of 0.5 (LFs
  /// no worse than chance) removes the label-swap symmetry of the model.
  double min_weight = 0.5;
  double max_weight = 0.95;
  /// After the continuous ascent, weights are moved onto the lattice
  /// min_weight + k * resolution and hill-climbed there one coordinate at a
  /// time. 0 keeps the continuous optimum (rounded to 1e-6).
  double resolution = 0.05;
  int max_iterations = 5000;
  double tolerance = 1e-10;
};

struct LabelModelResult {
  std::vector<double> weights;
  /// LFs that never vote keep weight 0.5 and are flagged here.
  std::vector<bool> never_votes;
  double log_likelihood = 0;
  int iterations = 0;
};

/// Mean marginal log-likelihood of the votes under the independent-accuracy
/// model: labels uniform over num_labels; a voting LF m is right with
/// probability w_m and otherwise picks one of the other labels uniformly.
double marginal_log_likelihood(const VoteMatrix& votes, std::span<const double> weights, int num_labels);

/// Projected gradient ascent on marginal_log_likelihood() with backtracking,
/// then lattice refinement (see LabelModelConfig::resolution). Raises InvalidArgument when no LF
/// ever votes or a vote is outside 0..num_labels-1.
LabelModelResult learn_weights(const VoteMatrix& votes, const LabelModelConfig& config = {});

/// Label with the largest summed weight of its voters; sums within 1e-9
/// count as equal and go to the lowest label id. kAbstain when nobody votes.
int aggregate(std::span<const int> votes, std::span<const double> weights, int num_labels);

}  // namespace cnat::weaksup
