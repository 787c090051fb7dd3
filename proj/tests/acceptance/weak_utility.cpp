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


#include <map>

#include "cnat/weaksup/pseudo.hpp"
#include "harness.hpp"

#ifndef CNAT_SOURCE_DIR
#error "CNAT_SOURCE_DIR must point at the source tree"
#endif

namespace acceptance {
namespace {

using cnat::data::Example;

struct WeakRun {
  double weak_acc = 0, annotated_acc = 0, coverage = 0, pseudo_acc = 0;
  int pseudo = 0;
};

WeakRun weak_vs_annotated(std::uint64_t seed) {
  auto task = cnat::data::SyntheticTaskConfig::spouse(seed);
  task.train_size = 32 + 2048;
  const auto splits = cnat::data::generate_synthetic(task);
  const std::vector<Example> annotated(splits.train.begin(), splits.train.begin() + 32);
  const std::vector<Example> unlabeled(splits.train.begin() + 32, splits.train.end());
  const auto lfs = cnat::weaksup::load_labeling_functions_file(std::string(CNAT_SOURCE_DIR) + "/configs/sp_lfs.cfg");
  const auto combined = cnat::weaksup::build_combined_dataset(annotated, unlabeled, lfs);

  WeakRun run;
  run.coverage = combined.coverage();
  run.pseudo = static_cast<int>(combined.examples.size()) - 32;
  {
    // Pseudo records keep their source ids, so gold labels can be looked up.
    std::map<std::string, int> gold;
    for (const auto& ex : unlabeled) gold[ex.id] = *ex.label;
    int right = 0;
    for (std::size_t i = 32; i < combined.examples.size(); ++i) {
      right += gold.at(combined.examples[i].id) == *combined.examples[i].label;
    }
    run.pseudo_acc = run.pseudo > 0 ? 100.0 * right / run.pseudo : 0.0;
  }

  const auto vocab = cnat::data::Vocab::build(splits.train);
  cnat::training::TrainConfig config;
  config.steps = 800;
  config.adam.learning_rate = 1e-3;
  config.weights.lm = 0.0;
  config.seed = seed;
  config.eval_every = 100;

  cnat::model::CnatModel<float> weak(desk_config(vocab, cnat::data::TaskFamily::kSpouse), seed);
  config.regime = cnat::training::Regime::kWeak;
  cnat::training::train(weak, combined.examples, vocab, config);
  run.weak_acc = label_accuracy(weak, splits.test, vocab);

  cnat::model::CnatModel<float> alone(desk_config(vocab, cnat::data::TaskFamily::kSpouse), seed);
  config.regime = cnat::training::Regime::kFull;
  cnat::training::train(alone, annotated, vocab, config);
  run.annotated_acc = label_accuracy(alone, splits.test, vocab);
  note(format("weak supervision seed %llu: weak %.1f, annotated only %.1f", static_cast<unsigned long long>(seed),
              run.weak_acc, run.annotated_acc));
  return run;
}

Outcome weak_utility() {
  bool pass = true;
  std::string detail = "test Acc weak vs annotated-only:";
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = weak_vs_annotated(seed);
    const double gain = r.weak_acc - r.annotated_acc;
    pass = pass && gain >= 5.0;
    detail += format(" seed %llu %.1f vs %.1f (gain %+.1f, %d pseudo, coverage %.2f, pseudo label acc %.1f)",
                     static_cast<unsigned long long>(seed), r.weak_acc, r.annotated_acc, gain, r.pseudo, r.coverage,
                     r.pseudo_acc);
  }
  return {pass, detail};
}

const Register reg(7, "weak supervision utility", weak_utility);

}  // namespace
}  // namespace acceptance
