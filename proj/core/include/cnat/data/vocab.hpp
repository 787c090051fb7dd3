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
#include <string>
#include <unordered_map>
#include <vector>

#include "cnat/data/example.hpp"

namespace cnat::data {

/// Whitespace split, lowercased.
std::vector<std::string> tokenize_words(const std::string& text);

/// Bidirectional token <-> id map. Ids 0..4 are PAD, UNK, BOS, EOS, SEP;
/// the rest are ordered by descending frequency, then lexicographically.
class Vocab {
 public:
  Vocab();

  static Vocab build(const std::vector<std::string>& texts, int min_count = 1);
  /// Every segment and explanation of `examples` plus any extra texts.
  static Vocab build(const std::vector<Example>& examples, const std::vector<std::string>& extra = {});

  int size() const { return static_cast<int>(tokens_.size()); }
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  bool contains(const std::string& token) const { return ids_.contains(token); }

  std::vector<int> tokenize(const std::string& text) const;
  /// Space-joined tokens; PAD/BOS/EOS are dropped.
  std::string detokenize(std::span<const int> ids) const;

  /// One token per line in id order.
  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

/// Encoder input: segment_a tokens, then SEP and segment_b tokens when present.
std::vector<int> encode_input(const Example& example, const Vocab& vocab);

}  // namespace cnat::data
