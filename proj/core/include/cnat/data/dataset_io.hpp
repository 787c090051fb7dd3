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

#include <iosfwd>
#include <string>
#include <vector>

#include "cnat/data/example.hpp"

namespace cnat::data {

// Line-delimited records, one JSON object per line:
//   {"id": "...", "segment_a": "...", "segment_b": "...", "label": 0,
//    "explanation": "...", "provenance": "human", "alignment": [0, 1]}
// id, segment_a and provenance are mandatory; the rest may be omitted.

std::string example_to_json_line(const Example& example);
/// Raises Parse naming `line_number` on malformed or incomplete records.
Example example_from_json_line(const std::string& line, int line_number);

void write_dataset(std::ostream& out, const std::vector<Example>& examples);
std::vector<Example> read_dataset(std::istream& in);

void save_dataset(const std::string& path, const std::vector<Example>& examples);
std::vector<Example> load_dataset(const std::string& path);

}  // namespace cnat::data
