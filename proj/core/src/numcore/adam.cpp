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

#include "cnat/numcore/adam.hpp"

#include <cmath>

#include "cnat/error.hpp"

namespace cnat::num {

template <typename T>
void adam_step(std::span<Var<T>> params, AdamState<T>& state) {
  if (state.step < 0) raise(ErrorCode::kInvalidArgument, "negative Adam step count");
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.shape());
      state.second_moment.emplace_back(p.shape());
    }
  }
  if (state.first_moment.size() != params.size()) {
    raise(ErrorCode::kShapeMismatch, "Adam state tracks " + std::to_string(state.first_moment.size()) +
                                         " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.first_moment[i].shape() != params[i].shape()) {
      raise(ErrorCode::kShapeMismatch, "Adam moment " + shape_string(state.first_moment[i].shape()) +
                                           " vs parameter " + shape_string(params[i].shape()));
    }
  }

  ++state.step;
  const double b1 = state.config.beta1;
  const double b2 = state.config.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = state.config.learning_rate;
  const double eps = state.config.epsilon;

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].mutable_value();
    const auto& grad = params[i].grad();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::int64_t j = 0; j < value.size(); ++j) {
      const double g = static_cast<double>(grad[j]);
      const double mj = b1 * static_cast<double>(m[j]) + (1.0 - b1) * g;
      const double vj = b2 * static_cast<double>(v[j]) + (1.0 - b2) * g * g;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double update = lr * (mj / correction1) / (std::sqrt(vj / correction2) + eps);
      value[j] = static_cast<T>(static_cast<double>(value[j]) - update);
    }
  }
}

template void adam_step<float>(std::span<Var<float>>, AdamState<float>&);
template void adam_step<double>(std::span<Var<double>>, AdamState<double>&);

}  // namespace cnat::num
