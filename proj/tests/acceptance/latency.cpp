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

#include <algorithm>
#include <cmath>

#include "cnat/evalkit/bench.hpp"
#include "harness.hpp"

namespace acceptance {
namespace {

using cnat::model::CnatModel;

Outcome latency_direction() {
  auto splits = cnat::data::generate_synthetic(cnat::data::SyntheticTaskConfig::nli(5));
  const auto vocab = cnat::data::Vocab::build(splits.train);
  auto config = desk_config(vocab, cnat::data::TaskFamily::kNli);
  config.dropout = 0.0;
  CnatModel<float> nar(config, 11);
  config.mode = cnat::model::DecodeMode::kAutoregressive;
  CnatModel<float> ar(config, 11);

  std::vector<std::vector<int>> inputs;
  for (const auto& ex : splits.test) {
    auto ids = cnat::data::encode_input(ex, vocab);
    if (static_cast<int>(ids.size()) * config.max_fertility >= 32) inputs.push_back(std::move(ids));
    if (inputs.size() == 24) break;
  }
  if (inputs.size() < 8) return {false, "too few inputs long enough for T=32"};

  cnat::evalkit::BenchOptions options;
  options.warmup = 5;
  options.repeats = 3;
  options.groups = 5;
  const std::vector<int> lengths{8, 16, 24, 32};
  const auto scaling = cnat::evalkit::latency_scaling(nar, ar, inputs, lengths, options);
  double mean_length = 0, nar_total = 0, ar_total = 0;
  for (const auto& p : scaling.points) {
    mean_length += p.length;
    nar_total += p.nar_ns;
    ar_total += p.ar_ns;
  }
  mean_length /= static_cast<double>(scaling.points.size());
  const double speedup = ar_total / nar_total;
  double ar_mean = 0;
  for (const auto& p : scaling.points) ar_mean += p.ar_ns / static_cast<double>(scaling.points.size());
  double ss_res = 0, ss_tot = 0;
  for (const auto& p : scaling.points) {
    const double fitted = scaling.ar.intercept + scaling.ar.slope * p.length;
    ss_res += (p.ar_ns - fitted) * (p.ar_ns - fitted);
    ss_tot += (p.ar_ns - ar_mean) * (p.ar_ns - ar_mean);
  }
  const double ar_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;

  std::string detail = format("mean T=%.0f speedup=%.2fx (need >=5), slope ratio=%.1f (need >=4), AR linear fit R^2=%.3f; per T:",
                              mean_length, speedup, scaling.slope_ratio, ar_r2);
  for (const auto& p : scaling.points) {
    detail += format(" T=%d nar=%.2fms ar=%.2fms", p.length, p.nar_ns / 1e6, p.ar_ns / 1e6);
  }
  const bool pass = mean_length >= 16 && speedup >= 5 && scaling.slope_ratio >= 4 && scaling.ar.slope > 0 && ar_r2 >= 0.9;
  return {pass, detail};
}

const Register reg(5, "NAR vs AR latency", latency_direction);

}  // namespace
}  // namespace acceptance
