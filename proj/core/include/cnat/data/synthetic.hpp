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
#include <string>
#include <vector>

#include "cnat/data/example.hpp"

namespace cnat::data {

/// kNli: premise/hypothesis pairs labelled entailment (0), contradiction (1)
/// or neutral (2). kSpouse: one sentence with two entities, each preceded by
/// the marker token "<e>", labelled no (0) or spouse (1).
enum class TaskFamily { kNli, kSpouse };

std::string to_string(TaskFamily family);
TaskFamily task_family_from_string(const std::string& text);
int label_count(TaskFamily family);
const std::vector<std::string>& label_names(TaskFamily family);

struct SyntheticTaskConfig {
  TaskFamily family = TaskFamily::kNli;
  // NLI inventories.
  std::vector<std::string> entities;
  std::vector<std::string> attributes;
  std::vector<std::string> verbs;
  std::vector<std::string> locations;
  // Spouse inventory.
  std::vector<std::string> names;

  std::uint64_t seed = 0;
  int train_size = 2048;
  int val_size = 256;
  int test_size = 256;
  /// Allowed deviation of each label's share from 1 / label_count.
  double balance_tolerance = 0.05;

  static SyntheticTaskConfig nli(std::uint64_t seed = 0);
  static SyntheticTaskConfig spouse(std::uint64_t seed = 0);
};

struct DatasetSplits {
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
};

/// Label-balanced splits with gold explanations and alignments. Raises
/// BalanceInfeasible when a split cannot hold every label within tolerance
/// or the inventories cannot express some label.
DatasetSplits generate_synthetic(const SyntheticTaskConfig& config);

}  // namespace cnat::data
