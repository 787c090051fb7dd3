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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "cnat/numcore/autodiff.hpp"
#include "cnat/numcore/rng.hpp"

namespace cnat::testing {

using num::Rng;
using num::Tensor;
using num::Var;

inline Tensor<double> random_tensor(num::Shape shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = scale * rng.normal();
  return t;
}

/// Values bounded away from zero, for ops with a kink or a pole there.
inline Tensor<double> away_from_zero(num::Shape shape, Rng& rng, double lo = 0.1, double hi = 2.0) {
  Tensor<double> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) {
    const double mag = lo + (hi - lo) * rng.uniform();
    t[i] = rng.bernoulli(0.5) ? mag : -mag;
  }
  return t;
}

struct GradCheck {
  double rel_error = 0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  int coordinates = 0;
};

/// Compares backward() against central differences for the scalar
/// sum(f(inputs) * R), R a fixed random projection. `max_coords` caps the
/// number of perturbed coordinates per input (sampled), 0 checks them all.
inline GradCheck check_gradients(std::vector<Var<double>>& inputs,
                                 const std::function<Var<double>(const std::vector<Var<double>>&)>& f, Rng& rng,
                                 double eps = 1e-6, int max_coords = 0) {
  const auto probe = f(inputs);
  const auto projection = Var<double>::constant(random_tensor(probe.shape(), rng));
  auto objective = [&]() { return num::sum(num::mul(f(inputs), projection)); };

  for (auto& in : inputs) in.zero_grad();
  num::backward(objective());

  double diff2 = 0, a2 = 0, n2 = 0;
  GradCheck out;
  for (auto& in : inputs) {
    const auto analytic = in.grad();
    std::vector<std::int64_t> coords(static_cast<std::size_t>(in.value().size()));
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = static_cast<std::int64_t>(i);
    if (max_coords > 0 && static_cast<int>(coords.size()) > max_coords) {
      rng.shuffle(coords);
      coords.resize(static_cast<std::size_t>(max_coords));
    }
    num::NoGradGuard guard;
    for (auto i : coords) {
      const double saved = in.value()[i];
      in.mutable_value()[i] = saved + eps;
      const double up = objective().item();
      in.mutable_value()[i] = saved - eps;
      const double down = objective().item();
      in.mutable_value()[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
      a2 += analytic[i] * analytic[i];
      n2 += numeric * numeric;
      ++out.coordinates;
    }
  }
  const double denom = std::max({std::sqrt(a2), std::sqrt(n2), 1e-12});
  out.rel_error = std::sqrt(diff2) / denom;
  return out;
}

}  // namespace cnat::testing
