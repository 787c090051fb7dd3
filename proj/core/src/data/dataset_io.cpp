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

#include "cnat/data/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "cnat/error.hpp"

namespace cnat::data {

using nlohmann::json;

std::string example_to_json_line(const Example& example) {
  // ordered_json keeps the field order stable so reruns are byte-identical.
  nlohmann::ordered_json j;
  j["id"] = example.id;
  j["segment_a"] = example.segment_a;
  if (example.segment_b) j["segment_b"] = *example.segment_b;
  if (example.label) j["label"] = *example.label;
  if (example.explanation) j["explanation"] = *example.explanation;
  j["provenance"] = to_string(example.provenance);
  if (!example.alignment.empty()) j["alignment"] = example.alignment;
  return j.dump();
}

Example example_from_json_line(const std::string& line, int line_number) {
  auto fail = [line_number](const std::string& what) {
    raise(ErrorCode::kParse, "line " + std::to_string(line_number) + ": " + what);
  };
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed record (") + e.what() + ")");
  }
  if (!j.is_object()) fail("record is not an object");
  Example ex;
  try {
    for (const char* key : {"id", "segment_a", "provenance"}) {
      if (!j.contains(key)) fail(std::string("missing mandatory field '") + key + "'");
    }
    ex.id = j.at("id").get<std::string>();
    ex.segment_a = j.at("segment_a").get<std::string>();
    ex.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    if (j.contains("segment_b") && !j["segment_b"].is_null()) ex.segment_b = j["segment_b"].get<std::string>();
    if (j.contains("label") && !j["label"].is_null()) ex.label = j["label"].get<int>();
    if (j.contains("explanation") && !j["explanation"].is_null()) ex.explanation = j["explanation"].get<std::string>();
    if (j.contains("alignment")) ex.alignment = j["alignment"].get<std::vector<int>>();
  } catch (const json::exception& e) {
    fail(std::string("bad field type (") + e.what() + ")");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse && std::string(e.what()).find("line ") == std::string::npos) fail(e.what());
    throw;
  }
  return ex;
}

void write_dataset(std::ostream& out, const std::vector<Example>& examples) {
  for (const auto& ex : examples) out << example_to_json_line(ex) << '\n';
}

std::vector<Example> read_dataset(std::istream& in) {
  std::vector<Example> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(example_from_json_line(line, lineno));
  }
  return out;
}

void save_dataset(const std::string& path, const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot write " + path);
  write_dataset(out, examples);
}

std::vector<Example> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path);
  return read_dataset(in);
}

}  // namespace cnat::data
