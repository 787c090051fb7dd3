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
#include <string>
#include <vector>

namespace cnat::data {

enum class Provenance { kHuman, kPseudo };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& text);

/// One record: one or two input segments, optional gold label and
/// explanation. `alignment`, when present, maps every explanation token to
/// the index of the encoded input token it was derived from.
struct Example {
  std::string id;
  std::string segment_a;
  std::optional<std::string> segment_b;
  std::optional<int> label;
  std::optional<std::string> explanation;
  Provenance provenance = Provenance::kHuman;
  std::vector<int> alignment;

  bool operator==(const Example&) const = default;
};

/// Aligns each explanation word to the first encoded-input position holding
/// the same word (input = segment_a words, SEP, segment_b words). Words that
/// do not occur in the input take the position of the next aligned word, or
/// of the previous one when none follows. Empty when nothing matches.
std::vector<int> align_explanation(const Example& example);

}  // namespace cnat::data
