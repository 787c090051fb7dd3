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

#include <cmath>

#include "cnat/error.hpp"
#include "cnat/numcore/adam.hpp"
#include "cnat/numcore/autodiff.hpp"
#include "gradcheck.hpp"

namespace {

using cnat::num::Tensor;
using cnat::num::Var;

Var<double> row(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return Var<double>::parameter(Tensor<double>({1, n}, std::move(values)));
}

TEST(Softmax, SymmetricInputIsUniform) {
  const auto p = cnat::num::softmax(row({0, 0}));
  EXPECT_DOUBLE_EQ(p.value()[0], 0.5);
  EXPECT_DOUBLE_EQ(p.value()[1], 0.5);
}

TEST(Softmax, MatchesExpNormalize) {
  const auto p = cnat::num::softmax(row({1, 2, 3}));
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p.value()[i], std::exp(i + 1.0) / z, 1e-12);
  EXPECT_NEAR(p.value()[0], 0.0900, 1e-4);
  EXPECT_NEAR(p.value()[2], 0.6652, 1e-4);
}

TEST(Softmax, ShiftInvariant) {
  const auto a = cnat::num::softmax(row({0.3, -1.2, 2.5, 0.0}));
  const auto b = cnat::num::softmax(row({100.3, 98.8, 102.5, 100.0}));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(a.value()[i], b.value()[i], 1e-12);
}

TEST(Softmax, NonFiniteInputRaises) {
  try {
    cnat::num::softmax(row({1.0, std::nan("")}));
    FAIL();
  } catch (const cnat::Error& e) {
    EXPECT_EQ(e.code(), cnat::ErrorCode::kNonFiniteInput);
  }
}

TEST(CrossEntropy, UniformIsLogClasses) {
  const std::vector<int> target{2};
  const auto loss = cnat::num::cross_entropy_probs(row({0.25, 0.25, 0.25, 0.25}), target);
  EXPECT_NEAR(loss.item(), std::log(4.0), 1e-12);
}

TEST(CrossEntropy, HandCase) {
  const std::vector<int> target{0};
  EXPECT_NEAR(cnat::num::cross_entropy_probs(row({0.7, 0.3}), target).item(), 0.3567, 1e-4);
  EXPECT_NEAR(cnat::num::cross_entropy_probs(row({1.0, 0.0}), target).item(), 0.0, 1e-12);
}

TEST(CrossEntropy, IgnoredRowsSkipped) {
  auto logits = Var<double>::parameter(Tensor<double>::from_rows({{0, 0}, {5, -5}}));
  const std::vector<int> targets{0, -1};
  EXPECT_NEAR(cnat::num::cross_entropy_logits(logits, targets).item(), std::log(2.0), 1e-12);
}

TEST(Backward, SumGivesOnes) {
  auto x = row({1, -2, 3});
  cnat::num::backward(cnat::num::sum(x));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(x.grad()[i], 1.0);
}

TEST(Backward, NoPathGivesZeros) {
  auto x = row({1, 2});
  auto c = Var<double>::parameter(Tensor<double>::scalar(3.0));
  cnat::num::backward(cnat::num::sum(c));
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], 0.0);
}

TEST(Backward, WeightedSoftmaxMatchesFiniteDifferences) {
  cnat::num::Rng rng(4);
  const auto w = cnat::testing::random_tensor({3, 5}, rng);
  std::vector<Var<double>> inputs{Var<double>::parameter(cnat::testing::random_tensor({3, 5}, rng))};
  const auto result = cnat::testing::check_gradients(
      inputs,
      [&](const std::vector<Var<double>>& in) {
        return cnat::num::mul(cnat::num::softmax(in[0]), Var<double>::constant(w));
      },
      rng);
  EXPECT_LT(result.rel_error, 1e-4);
}

TEST(Backward, NoGradGuardRecordsNothing) {
  auto x = row({1, 2});
  Var<double> y;
  {
    cnat::num::NoGradGuard guard;
    EXPECT_FALSE(cnat::num::grad_enabled());
    y = cnat::num::sum(cnat::num::scale(x, 2.0));
  }
  EXPECT_TRUE(cnat::num::grad_enabled());
  EXPECT_TRUE(y.node()->parents.empty());
}

TEST(Embedding, LookupAndPadRow) {
  auto table = Var<double>::parameter(Tensor<double>::from_rows({{1, 2}, {3, 4}, {5, 6}}));
  const std::vector<int> ids{0, 2};
  const auto out = cnat::num::embedding_lookup(table, ids, 0);
  EXPECT_EQ(out.value().at(0, 0), 0.0);  // PAD reads as zeros
  EXPECT_EQ(out.value().at(1, 1), 6.0);
  const auto plain = cnat::num::embedding_lookup(table, ids);
  EXPECT_EQ(plain.value().at(0, 1), 2.0);
}

TEST(Embedding, RepeatedIdAccumulates) {
  auto table = Var<double>::parameter(Tensor<double>({4, 3}, 0.5));
  const std::vector<int> ids{1, 1};
  cnat::num::backward(cnat::num::sum(cnat::num::embedding_lookup(table, ids)));
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(table.grad().at(1, c), 2.0);
    EXPECT_EQ(table.grad().at(0, c), 0.0);
  }
}

TEST(Adam, DefaultsAreThePublishedOnes) {
  const cnat::num::AdamConfig c;
  EXPECT_EQ(c.learning_rate, 0.00004);
  EXPECT_EQ(c.beta1, 0.9);
  EXPECT_EQ(c.beta2, 0.999);
  EXPECT_EQ(c.epsilon, 1e-8);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  std::vector<Var<double>> params{row({0.5, -1.5})};
  params[0].zero_grad();
  cnat::num::AdamState<double> state(cnat::num::AdamConfig{0.1});
  cnat::num::adam_step<double>(params, state);
  EXPECT_EQ(params[0].value()[0], 0.5);
  EXPECT_EQ(params[0].value()[1], -1.5);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<Var<double>> params{Var<double>::parameter(Tensor<double>::scalar(0.0))};
  params[0].mutable_grad()[0] = 1.0;
  cnat::num::AdamState<double> state(cnat::num::AdamConfig{0.1});
  cnat::num::adam_step<double>(params, state);
  // m_hat = 1, v_hat = 1: step = lr / (1 + eps).
  EXPECT_NEAR(params[0].value()[0], -0.1 / (1.0 + 1e-8), 1e-15);
}

TEST(Adam, ShapeChangeRaises) {
  std::vector<Var<double>> params{row({1, 2})};
  cnat::num::AdamState<double> state;
  cnat::num::adam_step<double>(params, state);
  std::vector<Var<double>> other{row({1, 2, 3})};
  EXPECT_THROW(cnat::num::adam_step<double>(other, state), cnat::Error);
}

TEST(ClipGradNorm, ScalesToMaxNorm) {
  std::vector<Var<double>> params{row({0, 0})};
  params[0].mutable_grad()[0] = 3.0;
  params[0].mutable_grad()[1] = 4.0;
  EXPECT_DOUBLE_EQ(cnat::num::clip_grad_norm<double>(params, 1.0), 5.0);
  EXPECT_NEAR(params[0].grad()[0], 0.6, 1e-12);
  EXPECT_NEAR(params[0].grad()[1], 0.8, 1e-12);
}

TEST(Rng, SeedReproducesStream) {
  cnat::num::Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

}  // namespace
