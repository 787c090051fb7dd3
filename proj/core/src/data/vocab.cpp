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

#include "cnat/data/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "cnat/error.hpp"
#include "cnat/tokens.hpp"

namespace cnat::data {

std::vector<std::string> tokenize_words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string word;
  while (is >> word) {
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::tolower(c); });
    out.push_back(std::move(word));
  }
  return out;
}

Vocab::Vocab() {
  for (const char* special : {"<pad>", "<unk>", "<bos>", "<eos>", "<sep>"}) add(special);
}

void Vocab::add(const std::string& token) {
  if (ids_.contains(token)) return;
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocab Vocab::build(const std::vector<std::string>& texts, int min_count) {
  std::map<std::string, int> counts;
  for (const auto& text : texts) {
    for (auto& w : tokenize_words(text)) ++counts[w];
  }
  std::vector<std::pair<std::string, int>> entries(counts.begin(), counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  for (const auto& [token, count] : entries) {
    if (count >= min_count) v.add(token);
  }
  return v;
}

Vocab Vocab::build(const std::vector<Example>& examples, const std::vector<std::string>& extra) {
  std::vector<std::string> texts = extra;
  for (const auto& ex : examples) {
    texts.push_back(ex.segment_a);
    if (ex.segment_b) texts.push_back(*ex.segment_b);
    if (ex.explanation) texts.push_back(*ex.explanation);
  }
  return build(texts);
}

int Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) raise(ErrorCode::kBadTokenId, "token id " + std::to_string(id) + " outside vocabulary");
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::tokenize(const std::string& text) const {
  std::vector<int> out;
  for (const auto& w : tokenize_words(text)) out.push_back(id(w));
  return out;
}

std::string Vocab::detokenize(std::span<const int> ids) const {
  std::string out;
  for (int i : ids) {
    if (i == kPadId || i == kBosId || i == kEosId) continue;
    if (!out.empty()) out += ' ';
    out += token(i);
  }
  return out;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::kIo, "cannot write " + path);
  for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path);
  Vocab v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (lineno < kNumSpecialTokens) {
      if (line != v.tokens_[static_cast<std::size_t>(lineno)]) {
        raise(ErrorCode::kParse, path + ":" + std::to_string(lineno + 1) + ": expected special token " +
                                     v.tokens_[static_cast<std::size_t>(lineno)]);
      }
    } else if (!line.empty()) {
      v.add(line);
    }
    ++lineno;
  }
  return v;
}

std::vector<int> encode_input(const Example& example, const Vocab& vocab) {
  auto ids = vocab.tokenize(example.segment_a);
  if (example.segment_b) {
    ids.push_back(kSepId);
    auto b = vocab.tokenize(*example.segment_b);
    ids.insert(ids.end(), b.begin(), b.end());
  }
  return ids;
}

}  // namespace cnat::data
