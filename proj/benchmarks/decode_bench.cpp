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


// Single-sequence decode latency of the parallel decoder against the
// token-by-token decoder at fixed explanation lengths.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "cnat/data/synthetic.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/model/cnat_model.hpp"

namespace {

using cnat::model::CnatModel;
using cnat::model::DecodeMode;

struct Fixture {
  std::unique_ptr<CnatModel<float>> nar, ar;
  std::vector<std::vector<int>> inputs;

  Fixture() {
    const auto splits = cnat::data::generate_synthetic(cnat::data::SyntheticTaskConfig::nli(5));
    const auto vocab = cnat::data::Vocab::build(splits.train);
    auto config = cnat::model::ModelConfig::desk(vocab.size(), 3);
    config.dropout = 0.0;
    nar = std::make_unique<CnatModel<float>>(config, 11);
    config.mode = DecodeMode::kAutoregressive;
    ar = std::make_unique<CnatModel<float>>(config, 11);
    for (const auto& ex : splits.test) {
      auto ids = cnat::data::encode_input(ex, vocab);
      if (static_cast<int>(ids.size()) * config.max_fertility >= 32) inputs.push_back(std::move(ids));
      if (inputs.size() == 16) break;
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_DecodeNar(benchmark::State& state) {
  const auto& f = fixture();
  cnat::model::GenerateOptions options;
  options.forced_length = static_cast<int>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.nar->generate(f.inputs[i++ % f.inputs.size()], options));
  }
  state.SetLabel("T=" + std::to_string(state.range(0)));
}

void BM_DecodeAr(benchmark::State& state) {
  const auto& f = fixture();
  cnat::model::GenerateOptions options;
  options.forced_length = static_cast<int>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.ar->generate_autoregressive(f.inputs[i++ % f.inputs.size()], options));
  }
  state.SetLabel("T=" + std::to_string(state.range(0)));
}

BENCHMARK(BM_DecodeNar)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DecodeAr)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
