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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cnat/error.hpp"
#include "cnat/model/checkpoint.hpp"
#include "cnat/model/cnat_model.hpp"
#include "cnat/model/language_model.hpp"

namespace {

using cnat::model::CnatModel;
using cnat::model::DecodeMode;
using cnat::model::ForwardContext;
using cnat::model::ModelConfig;

ModelConfig tiny(DecodeMode mode = DecodeMode::kNonAutoregressive) {
  auto c = ModelConfig::desk(30, 3);
  c.d_model = 16;
  c.heads = 2;
  c.ffn_width = 32;
  c.label_hidden = 16;
  c.dropout = 0.0;
  c.mode = mode;
  return c;
}

const std::vector<int> kInput{5, 9, 4, 7, 12};

TEST(CopyByFertility, RepeatsTokens) {
  EXPECT_EQ(cnat::model::copy_by_fertility(std::vector<int>{10, 11}, std::vector<int>{2, 1}),
            (std::vector<int>{10, 10, 11}));
  EXPECT_EQ(cnat::model::copy_by_fertility(std::vector<int>{10, 11, 12}, std::vector<int>{2, 0, 1}),
            (std::vector<int>{10, 10, 12}));
  EXPECT_EQ(cnat::model::copy_by_fertility(std::vector<int>{10, 11, 12}, std::vector<int>{1, 1, 1}),
            (std::vector<int>{10, 11, 12}));
}

TEST(CopyByFertility, Errors) {
  EXPECT_THROW(cnat::model::copy_by_fertility(std::vector<int>{1, 2}, std::vector<int>{1}), cnat::Error);
  EXPECT_THROW(cnat::model::copy_by_fertility(std::vector<int>{1, 2}, std::vector<int>{0, 0}), cnat::Error);
}

TEST(SelfAttentionMask, NarAllowsAllArIsCausal) {
  const auto nar = cnat::model::build_self_attention_mask(3, DecodeMode::kNonAutoregressive);
  EXPECT_TRUE(std::all_of(nar.begin(), nar.end(), [](auto v) { return v == 1; }));
  const auto ar = cnat::model::build_self_attention_mask(3, DecodeMode::kAutoregressive);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(ar[static_cast<std::size_t>(i * 3 + j)], j <= i ? 1 : 0);
  }
}

TEST(Encoder, ShapeAndDeterminism) {
  const CnatModel<float> m(tiny(), 1);
  auto ctx = ForwardContext::inference();
  const auto a = m.encode(kInput, ctx);
  const auto b = m.encode(kInput, ctx);
  EXPECT_EQ(a.shape(), (cnat::num::Shape{5, 16}));
  EXPECT_EQ(a.value(), b.value());
}

TEST(Encoder, PerturbationReachesEveryRow) {
  const CnatModel<double> m(tiny(), 2);
  auto ctx = ForwardContext::inference();
  auto other = kInput;
  other[3] = 20;
  const auto a = m.encode(kInput, ctx).value();
  const auto b = m.encode(other, ctx).value();
  for (int r = 0; r < a.rows(); ++r) {
    bool changed = false;
    for (int c = 0; c < a.cols(); ++c) changed = changed || a.at(r, c) != b.at(r, c);
    EXPECT_TRUE(changed) << "row " << r;
  }
}

TEST(Encoder, RejectsBadInput) {
  const CnatModel<float> m(tiny(), 1);
  auto ctx = ForwardContext::inference();
  EXPECT_THROW(m.encode(std::vector<int>{}, ctx), cnat::Error);
  EXPECT_THROW(m.encode(std::vector<int>{5, 99}, ctx), cnat::Error);
}

TEST(Fertility, ArgmaxWithinRange) {
  const CnatModel<double> m(tiny(), 3);
  auto ctx = ForwardContext::inference();
  const auto pred = m.predict_fertility(m.encode(kInput, ctx));
  ASSERT_EQ(pred.fertility.size(), kInput.size());
  const auto& logits = pred.logits.value();
  EXPECT_EQ(logits.cols(), tiny().max_fertility + 1);
  for (int s = 0; s < logits.rows(); ++s) {
    int best = 0;
    for (int f = 1; f < logits.cols(); ++f) {
      if (logits.at(s, f) > logits.at(s, best)) best = f;
    }
    EXPECT_EQ(pred.fertility[static_cast<std::size_t>(s)], best);
  }
}

TEST(Decoder, CrossAttentionIsLive) {
  const CnatModel<double> m(tiny(), 4);
  auto ctx = ForwardContext::inference();
  const auto encoded = m.encode(kInput, ctx);
  const std::vector<int> dec{5, 5, 9, 7};
  const auto a = m.decode(dec, encoded, ctx).value();
  const auto zero = cnat::num::Var<double>::constant(cnat::num::Tensor<double>(encoded.shape()));
  const auto b = m.decode(dec, zero, ctx).value();
  EXPECT_EQ(a.shape(), (cnat::num::Shape{4, 16}));
  EXPECT_NE(a, b);
}

TEST(Decoder, PositionalWeightsDependOnlyOnLength) {
  const CnatModel<double> m(tiny(), 5);
  auto ctx = ForwardContext::inference();
  cnat::model::DecodeTrace<double> t1, t2;
  m.decode(std::vector<int>{5, 6, 7}, m.encode(kInput, ctx), ctx, &t1);
  m.decode(std::vector<int>{9, 12, 4}, m.encode(std::vector<int>{9, 12}, ctx), ctx, &t2);
  ASSERT_FALSE(t1.positional_weights.empty());
  EXPECT_EQ(t1.positional_weights[0], t2.positional_weights[0]);
  const auto& w = t1.positional_weights[0];
  for (int r = 0; r < w.rows(); ++r) {
    double s = 0;
    for (double v : w.row(r)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(LabelHead, PermutationInvariant) {
  const CnatModel<double> m(tiny(), 6);
  cnat::num::Rng rng(1);
  cnat::num::Tensor<double> h({4, 16});
  for (std::int64_t i = 0; i < h.size(); ++i) h[i] = rng.normal();
  cnat::num::Tensor<double> p({4, 16});
  const int order[4] = {2, 0, 3, 1};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 16; ++c) p.at(r, c) = h.at(order[r], c);
  }
  const auto a = m.predict_label(cnat::num::Var<double>::constant(h)).value();
  const auto b = m.predict_label(cnat::num::Var<double>::constant(p)).value();
  double total = 0;
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-12);
    total += a[i];
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(Generate, LengthIsFertilitySumAndOnePass) {
  const CnatModel<float> m(tiny(), 7);
  const auto before = m.decoder_passes();
  const auto out = m.generate(kInput);
  int total = 0;
  for (int f : out.fertility) total += f;
  EXPECT_EQ(static_cast<int>(out.explanation.size()), total);
  EXPECT_EQ(m.decoder_passes() - before, 1u);
  EXPECT_EQ(out.token_probs.rows(), total);
}

TEST(Generate, ExplainFalseGivesLabelOnly) {
  const CnatModel<float> m(tiny(), 7);
  cnat::model::GenerateOptions options;
  options.explain = false;
  const auto out = m.generate(kInput, options);
  EXPECT_TRUE(out.explanation.empty());
  EXPECT_GE(out.label, 0);
  EXPECT_LT(out.label, 3);
}

TEST(Generate, GreedyTokensAreRowArgmax) {
  const CnatModel<float> m(tiny(), 8);
  const auto out = m.generate(kInput);
  for (int t = 0; t < out.token_probs.rows(); ++t) {
    const auto r = out.token_probs.row(t);
    EXPECT_EQ(out.explanation[static_cast<std::size_t>(t)], std::max_element(r.begin(), r.end()) - r.begin());
  }
}

TEST(Autoregressive, PassesEqualEmittedTokens) {
  const CnatModel<float> m(tiny(DecodeMode::kAutoregressive), 9);
  cnat::model::GenerateOptions options;
  options.forced_length = 6;
  const auto out = m.generate_autoregressive(kInput, options);
  EXPECT_EQ(out.explanation.size(), 6u);
  EXPECT_EQ(out.decoder_passes, out.emitted_tokens);
  EXPECT_THROW(CnatModel<float>(tiny(), 9).generate_autoregressive(kInput), cnat::Error);
}

TEST(LanguageModel, OneHotMatchesIdPath) {
  auto config = tiny();
  const cnat::model::LanguageModel<double> lm(config, 3);
  const std::vector<int> sentence{6, 8, 11, 5};
  cnat::num::Tensor<double> onehot({4, config.vocab_size});
  for (int t = 0; t < 4; ++t) onehot.at(t, sentence[static_cast<std::size_t>(t)]) = 1.0;
  auto ctx = ForwardContext::inference();
  const double hard = lm.log_likelihood(sentence, ctx).item();
  const double soft = lm.log_likelihood_soft(cnat::num::Var<double>::constant(onehot), ctx).item();
  EXPECT_NEAR(hard, soft, 1e-10);
}

TEST(LanguageModel, ZeroHeadIsUniform) {
  auto config = tiny();
  cnat::model::LanguageModel<double> lm(config, 3);
  auto head = lm.output_head();
  head.weight.mutable_value().fill(0.0);
  head.bias.mutable_value().fill(0.0);
  for (double lp : lm.token_log_probs(std::vector<int>{6, 7, 8})) EXPECT_NEAR(lp, -std::log(30.0), 1e-12);
}

TEST(Checkpoint, RoundTripIsExact) {
  const CnatModel<float> m(tiny(), 10);
  const std::string path = ::testing::TempDir() + "/model_roundtrip.ckpt";
  cnat::model::save_model(path, m);
  const auto loaded = cnat::model::load_model(path);
  EXPECT_EQ(loaded.config(), m.config());
  for (std::size_t i = 0; i < m.parameters().size(); ++i) {
    EXPECT_EQ(loaded.parameters().vars()[i].value(), m.parameters().vars()[i].value());
  }
  EXPECT_EQ(loaded.generate(kInput).explanation, m.generate(kInput).explanation);
}

TEST(Checkpoint, BadMagicRaises) {
  std::istringstream in("NOPE!");
  EXPECT_THROW(cnat::model::read_checkpoint(in), cnat::Error);
}

TEST(ModelConfig, ValidateAndTextRoundTrip) {
  auto c = tiny();
  EXPECT_EQ(ModelConfig::from_text(c.to_text()), c);
  c.heads = 3;
  EXPECT_THROW(c.validate(), cnat::Error);
}

}  // namespace
