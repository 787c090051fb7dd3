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

#include "harness.hpp"

#include <cstdarg>
#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <exception>
#include <iostream>

#include "cnat/evalkit/metrics.hpp"

namespace acceptance {

std::vector<Criterion>& registry() {
  static std::vector<Criterion> all;
  return all;
}

Register::Register(int number, std::string name, std::function<Outcome()> run) {
  registry().push_back({number, std::move(name), std::move(run)});
}

std::string format(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

namespace {
const auto kStart = std::chrono::steady_clock::now();
}

void note(const std::string& text) {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - kStart).count();
  std::fprintf(stderr, "[%7.1fs] %s\n", s, text.c_str());
}

cnat::model::ModelConfig desk_config(const cnat::data::Vocab& vocab, cnat::data::TaskFamily family) {
  return cnat::model::ModelConfig::desk(vocab.size(), cnat::data::label_count(family));
}

double label_accuracy(const cnat::model::CnatModel<float>& model, const std::vector<cnat::data::Example>& examples,
                      const cnat::data::Vocab& vocab) {
  std::vector<int> predicted, gold;
  cnat::model::GenerateOptions options;
  options.explain = false;
  for (const auto& ex : examples) {
    predicted.push_back(model.generate(cnat::data::encode_input(ex, vocab), options).label);
    gold.push_back(*ex.label);
  }
  return cnat::evalkit::accuracy(predicted, gold);
}

}  // namespace acceptance

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--only N]...\n", argv[0]);
      return 2;
    }
  }
  auto& all = acceptance::registry();
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.number < b.number; });
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
    acceptance::note("criterion " + std::to_string(c.number) + ": " + c.name);
    const auto t0 = std::chrono::steady_clock::now();
    acceptance::Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", c.number, c.name.c_str(),
                out.detail.c_str(), s);
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
