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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnat/data/config_file.hpp"
#include "cnat/data/example.hpp"

namespace cnat::weaksup {

inline constexpr int kAbstain = -1;

/// Predicate over an example. Grammar:
///
///   expr   := term ("or" term)*
///   term   := factor ("and" factor)*
///   factor := "not" factor | "(" expr ")" | atom
///   atom   := has(words [, seg])        any token of seg is one of words
///           | substr("text" [, seg])    seg contains the text
///           | subset(x, y)              tokens of segment x are a subset of y's
///           | window(words, k)          a keyword lies between the two
///                                       "<e>"-marked names, at most k tokens apart
///   words  := word ("|" word)*
///   seg    := a | b | any
class Rule {
 public:
  /// Raises BadRule on any syntax error.
  static Rule parse(const std::string& text);

  bool evaluate(const data::Example& example) const;
  const std::string& text() const { return text_; }
  /// Keywords named by has() and window() atoms, in source order.
  const std::vector<std::string>& keywords() const { return keywords_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  std::vector<std::string> keywords_;
};

/// Explanation text with {A}, {B}, {E1}, {E2}, {keyword} and {diff} slots.
class Template {
 public:
  /// Raises BadRule on an unknown or unterminated slot.
  static Template parse(const std::string& text);

  const std::string& text() const { return text_; }
  const std::vector<std::string>& slots() const { return slots_; }
  /// Empty when a slot finds nothing to fill it with.
  std::optional<std::string> instantiate(const data::Example& example, const Rule& owner) const;

 private:
  std::string text_;
  std::vector<std::string> slots_;
};

struct LabelingFunction {
  std::string id;
  Rule rule;
  int label = 0;
  Template explanation;
};

/// Sections named "lf:<id>" with keys label, rule and template. Raises
/// BadRule on a missing key or malformed rule/template.
std::vector<LabelingFunction> load_labeling_functions(const data::ConfigFile& config);
std::vector<LabelingFunction> load_labeling_functions_file(const std::string& path);

/// One vote per labeling function: its label when the rule fires, else kAbstain.
std::vector<int> apply_lfs(const data::Example& example, std::span<const LabelingFunction> lfs);

/// Example-major vote matrix.
using VoteMatrix = std::vector<std::vector<int>>;
VoteMatrix apply_lfs(std::span<const data::Example> examples, std::span<const LabelingFunction> lfs);

}  // namespace cnat::weaksup
