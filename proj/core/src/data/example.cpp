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

#include "cnat/data/example.hpp"

#include "cnat/data/vocab.hpp"
#include "cnat/error.hpp"

namespace cnat::data {

std::string to_string(Provenance p) { return p == Provenance::kPseudo ? "pseudo" : "human"; }

Provenance provenance_from_string(const std::string& text) {
  if (text == "human") return Provenance::kHuman;
  if (text == "pseudo") return Provenance::kPseudo;
  raise(ErrorCode::kParse, "unknown provenance '" + text + "'");
}

std::vector<int> align_explanation(const Example& example) {
  if (!example.explanation) return {};
  auto input = tokenize_words(example.segment_a);
  if (example.segment_b) {
    input.push_back("<sep>");
    for (auto& w : tokenize_words(*example.segment_b)) input.push_back(std::move(w));
  }
  const auto words = tokenize_words(*example.explanation);
  std::vector<int> source(words.size(), -1);
  bool any = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < input.size(); ++j) {
      if (input[j] == words[i]) {
        source[i] = static_cast<int>(j);
        any = true;
        break;
      }
    }
  }
  if (!any) return {};
  std::vector<int> out(source);
  int next = -1;
  for (std::size_t i = out.size(); i-- > 0;) {
    if (source[i] >= 0) next = source[i];
    else out[i] = next;
  }
  int prev = -1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (source[i] >= 0) prev = source[i];
    if (out[i] < 0) out[i] = prev;
  }
  return out;
}

}  // namespace cnat::data
