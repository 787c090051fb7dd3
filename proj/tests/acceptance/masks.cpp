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

#include <numeric>

#include "cnat/model/cnat_model.hpp"
#include "harness.hpp"

namespace acceptance {
namespace {

using cnat::model::CnatModel;
using cnat::model::DecodeMode;
using cnat::model::ModelConfig;
using cnat::num::Rng;

ModelConfig small_config(DecodeMode mode, int vocab) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.d_model = 16;
  c.heads = 2;
  c.encoder_layers = 2;
  c.decoder_layers = 2;
  c.ffn_width = 32;
  c.max_fertility = 3;
  c.max_length = 48;
  c.dropout = 0.0;
  c.num_labels = 3;
  c.label_hidden = 16;
  c.mode = mode;
  return c;
}

std::vector<int> random_tokens(Rng& rng, int n, int vocab) {
  std::vector<int> ids;
  for (int i = 0; i < n; ++i) ids.push_back(5 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(vocab - 5))));
  return ids;
}

Outcome length_and_mask_laws() {
  Rng rng(77);
  const int vocab = 40;

  int generations = 0, length_ok = 0;
  for (int m = 0; m < 10; ++m) {
    CnatModel<float> model(small_config(DecodeMode::kNonAutoregressive, vocab), rng.next_u64());
    for (int i = 0; i < 100; ++i) {
      const auto input = random_tokens(rng, 1 + static_cast<int>(rng.uniform_int(15)), vocab);
      const auto out = model.generate(input);
      ++generations;
      if (static_cast<int>(out.explanation.size()) == std::accumulate(out.fertility.begin(), out.fertility.end(), 0)) {
        ++length_ok;
      }
    }
  }

  // Perturb one decoder input token and compare the T x d decoder states.
  int nar_probes = 0, nar_ok = 0, ar_probes = 0, ar_ok = 0;
  for (int m = 0; m < 4; ++m) {
    const auto seed = rng.next_u64();
    CnatModel<double> nar(small_config(DecodeMode::kNonAutoregressive, vocab), seed);
    CnatModel<double> ar(small_config(DecodeMode::kAutoregressive, vocab), seed);
    auto ctx = cnat::model::ForwardContext::inference();
    for (int i = 0; i < 25; ++i) {
      const auto source = random_tokens(rng, 2 + static_cast<int>(rng.uniform_int(10)), vocab);
      const auto dec_in = random_tokens(rng, 2 + static_cast<int>(rng.uniform_int(14)), vocab);
      const int len = static_cast<int>(dec_in.size());
      const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(len)));
      auto changed = dec_in;
      changed[static_cast<std::size_t>(j)] = changed[static_cast<std::size_t>(j)] == 5 ? 6 : 5;

      auto row_differs = [](const auto& a, const auto& b, int t) {
        for (int c = 0; c < a.cols(); ++c) {
          if (a.at(t, c) != b.at(t, c)) return true;
        }
        return false;
      };
      {
        const auto enc = nar.encode(source, ctx);
        const auto base = nar.decode(dec_in, enc, ctx).value();
        const auto pert = nar.decode(changed, enc, ctx).value();
        ++nar_probes;
        bool all = true;
        for (int t = 0; t < len; ++t) all = all && row_differs(base, pert, t);
        if (all) ++nar_ok;
      }
      {
        const auto enc = ar.encode(source, ctx);
        const auto base = ar.decode(dec_in, enc, ctx).value();
        const auto pert = ar.decode(changed, enc, ctx).value();
        ++ar_probes;
        bool causal = true;
        for (int t = 0; t < len; ++t) causal = causal && (row_differs(base, pert, t) == (t >= j));
        if (causal) ++ar_ok;
      }
    }
  }
  const bool pass = length_ok == generations && nar_ok == nar_probes && ar_ok == ar_probes && generations >= 1000;
  return {pass, format("len=sum(F) in %d/%d generations; NAR bidirectional %d/%d probes; AR strictly causal %d/%d probes",
                       length_ok, generations, nar_ok, nar_probes, ar_ok, ar_probes)};
}

const Register reg(2, "length and mask laws", length_and_mask_laws);

}  // namespace
}  // namespace acceptance
