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

#include "cnat/unsup/paraphraser.hpp"

#include <cstdio>
#include <fstream>
#include <semaphore>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "cnat/data/parallel.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/error.hpp"
#include "cnat/numcore/rng.hpp"

namespace cnat::unsup {
namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& connective_whitelist() {
  static const std::vector<std::string> words = {"and", "so", "while", "because", "then"};
  return words;
}

std::map<std::string, std::vector<std::string>> load_synonym_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path);
  std::map<std::string, std::vector<std::string>> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto words = data::tokenize_words(line);
    if (words.empty()) continue;
    if (words.size() != 2) {
      raise(ErrorCode::kParse, path + ":" + std::to_string(lineno) + ": expected two columns");
    }
    table[words[0]].push_back(words[1]);
  }
  return table;
}

struct Paraphraser::External {
  explicit External(const ExternalEndpoint& e) : endpoint(e), slots(std::max(1, e.max_in_flight)) {}

  std::optional<std::string> translate(const std::string& text, const std::string& from, const std::string& to) {
    slots.acquire();
    struct Release {
      std::counting_semaphore<1024>& s;
      ~Release() { s.release(); }
    } release{slots};
    httplib::Client client(endpoint.host, endpoint.port);
    const auto secs = static_cast<time_t>(endpoint.timeout_seconds);
    const auto usecs = static_cast<time_t>((endpoint.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    nlohmann::json body = {{"text", text}, {"source", from}, {"target", to}};
    for (int attempt = 0; attempt <= endpoint.retries; ++attempt) {
      auto res = client.Post(endpoint.path, body.dump(), "application/json");
      if (!res || res->status != 200) continue;
      try {
        auto reply = nlohmann::json::parse(res->body);
        auto out = reply.at("text").get<std::string>();
        if (!data::tokenize_words(out).empty()) return out;
      } catch (const nlohmann::json::exception&) {
      }
    }
    return std::nullopt;
  }

  ExternalEndpoint endpoint;
  std::counting_semaphore<1024> slots;
};

Paraphraser::Paraphraser(ParaphraserConfig config) : config_(std::move(config)) {
  for (const auto& [word, options] : config_.surrogate.synonyms) {
    for (const auto& o : options) {
      if (data::tokenize_words(o).size() != 1) {
        raise(ErrorCode::kInvalidArgument, "synonym of '" + word + "' must be a single word");
      }
    }
  }
  if (config_.mode == ParaphraseMode::kExternal) external_ = std::make_unique<External>(config_.external);
}

Paraphraser::~Paraphraser() = default;

std::string Paraphraser::surrogate(const std::string& segment_a, const std::string* segment_b) const {
  const std::string key = segment_b ? segment_a + " <sep> " + *segment_b : segment_a;
  num::Rng rng(config_.seed ^ fnv1a(key));
  const auto& rules = config_.surrogate;
  auto rewrite = [&](const std::string& text) {
    auto words = data::tokenize_words(text);
    for (auto& w : words) {
      auto it = rules.synonyms.find(w);
      if (it == rules.synonyms.end() || it->second.empty()) continue;
      if (!rng.bernoulli(rules.synonym_rate)) continue;
      w = data::tokenize_words(it->second[static_cast<std::size_t>(rng.uniform_int(it->second.size()))])[0];
    }
    return words;
  };
  auto first = rewrite(segment_a);
  if (!segment_b) return join(first);
  auto second = rewrite(*segment_b);
  if (rng.bernoulli(rules.reorder_rate)) std::swap(first, second);
  if (rng.bernoulli(rules.connective_rate)) {
    const auto& c = connective_whitelist();
    first.push_back(c[static_cast<std::size_t>(rng.uniform_int(c.size()))]);
  }
  first.insert(first.end(), second.begin(), second.end());
  return join(first);
}

std::string Paraphraser::pseudo_target(const data::Example& example) const {
  const std::string* b = example.segment_b ? &*example.segment_b : nullptr;
  if (data::tokenize_words(example.segment_a).empty() && (!b || data::tokenize_words(*b).empty())) {
    raise(ErrorCode::kEmptyInput, "record '" + example.id + "' has no input words");
  }
  if (external_) {
    const auto& e = config_.external;
    const std::string text = b ? example.segment_a + " " + *b : example.segment_a;
    if (auto pivot = external_->translate(text, e.source_language, e.pivot_language)) {
      if (auto back = external_->translate(*pivot, e.pivot_language, e.source_language)) {
        auto words = data::tokenize_words(*back);
        const std::size_t limit = data::tokenize_words(text).size() + 1;
        if (words.size() > limit) words.resize(limit);
        return join(words);
      }
    }
    ++fallbacks_;
    std::fprintf(stderr, "paraphrase: external endpoint failed for '%s', using the surrogate\n", example.id.c_str());
  }
  return surrogate(example.segment_a, b);
}

std::vector<data::Example> build_unsup_dataset(const std::vector<data::Example>& inputs, const Paraphraser& paraphraser) {
  std::vector<data::Example> out(inputs.size());
  data::parallel_for(inputs.size(), [&](std::size_t i) {
    data::Example ex = inputs[i];
    ex.explanation = paraphraser.pseudo_target(inputs[i]);
    ex.provenance = data::Provenance::kPseudo;
    ex.alignment = data::align_explanation(ex);
    out[i] = std::move(ex);
  });
  return out;
}

}  // namespace cnat::unsup
