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

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cnat/data/example.hpp"

namespace cnat::unsup {

enum class ParaphraseMode { kSurrogate, kExternal };

/// Connectives the surrogate may insert between segments.
const std::vector<std::string>& connective_whitelist();

struct SurrogateRules {
  /// word -> single-word replacements.
  std::map<std::string, std::vector<std::string>> synonyms;
  /// Probability of replacing a word that has synonyms.
  double synonym_rate = 1.0;
  /// Probability of swapping the two segments.
  double reorder_rate = 0.5;
  /// Probability of joining two segments with a connective.
  double connective_rate = 0.5;
};

/// A text-in/text-out translation service: POST {"text", "source",
/// "target"} as JSON to http://host:port/path, reply {"text": ...}.
struct ExternalEndpoint {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string path = "/translate";
  std::string source_language = "en";
  std::string pivot_language = "de";
  double timeout_seconds = 5.0;
  int retries = 1;
  int max_in_flight = 4;
};

struct ParaphraserConfig {
  ParaphraseMode mode = ParaphraseMode::kSurrogate;
  SurrogateRules surrogate;
  ExternalEndpoint external;
  std::uint64_t seed = 0;
};

/// Two-column "word synonym" lines; '#' starts a comment. Raises Parse on a
/// malformed line.
std::map<std::string, std::vector<std::string>> load_synonym_table(const std::string& path);

/// Back-translation stand-in. Surrogate output depends only on (seed, text).
class Paraphraser {
 public:
  explicit Paraphraser(ParaphraserConfig config);
  ~Paraphraser();
  Paraphraser(const Paraphraser&) = delete;
  Paraphraser& operator=(const Paraphraser&) = delete;

  const ParaphraserConfig& config() const { return config_; }

  /// Paraphrase of the input segments, never empty. Raises EmptyInput when
  /// the example has no words. External failures fall back to the surrogate.
  std::string pseudo_target(const data::Example& example) const;
  std::string surrogate(const std::string& segment_a, const std::string* segment_b) const;

  /// External requests that fell back to the surrogate.
  int fallbacks() const { return fallbacks_.load(); }

 private:
  struct External;
  ParaphraserConfig config_;
  std::unique_ptr<External> external_;
  mutable std::atomic<int> fallbacks_{0};
};

/// Every input gains a pseudo explanation (provenance pseudo); labels are
/// kept. Existing explanations are replaced.
std::vector<data::Example> build_unsup_dataset(const std::vector<data::Example>& inputs, const Paraphraser& paraphraser);

}  // namespace cnat::unsup
