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

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cnat/data/example.hpp"
#include "cnat/data/synthetic.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/model/cnat_model.hpp"
#include "cnat/training/trainer.hpp"

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  std::function<Outcome()> run;
};

std::vector<Criterion>& registry();

struct Register {
  Register(int number, std::string name, std::function<Outcome()> run);
};

/// printf into a std::string.
std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

/// Progress line on stderr, prefixed with elapsed seconds.
void note(const std::string& text);

cnat::model::ModelConfig desk_config(const cnat::data::Vocab& vocab, cnat::data::TaskFamily family);

/// Label accuracy (in percent) of greedy decoding on `examples`.
double label_accuracy(const cnat::model::CnatModel<float>& model, const std::vector<cnat::data::Example>& examples,
                      const cnat::data::Vocab& vocab);

}  // namespace acceptance
