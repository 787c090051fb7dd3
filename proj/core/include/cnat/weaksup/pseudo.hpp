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
#include <span>
#include <string>
#include <vector>

#include "cnat/data/example.hpp"
#include "cnat/weaksup/label_model.hpp"
#include "cnat/weaksup/rules.hpp"

namespace cnat::weaksup {

/// Template of the highest-weight LF among those voting the aggregated
/// label (first such LF on equal weights), filled from the example. Empty
/// when nobody votes or a slot cannot be filled.
std::optional<std::string> make_pseudo_explanation(const data::Example& example, std::span<const int> votes,
                                                   std::span<const LabelingFunction> lfs,
                                                   std::span<const double> weights, int num_labels);

struct CombinedDataset {
  std::vector<data::Example> examples;  // annotated first, then pseudo records
  std::vector<double> weights;          // learned LF weights (empty without LFs)
  std::vector<bool> never_votes;
  int unlabeled = 0;  // unlabeled records offered
  int covered = 0;    // of those, records with a non-abstain pseudo label
  int dropped = 0;    // covered records whose template could not be filled
  double coverage() const { return unlabeled == 0 ? 0.0 : static_cast<double>(covered) / unlabeled; }
};

/// Annotated records kept verbatim; each unlabeled record with a pseudo
/// label gains that label, a pseudo explanation and provenance pseudo.
/// Unlabeled records' own labels and explanations are ignored.
CombinedDataset build_combined_dataset(const std::vector<data::Example>& annotated,
                                       const std::vector<data::Example>& unlabeled,
                                       std::span<const LabelingFunction> lfs, const LabelModelConfig& config = {});

}  // namespace cnat::weaksup
