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

#include "cnat/evalkit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "cnat/error.hpp"

namespace cnat::evalkit {

LatencySummary summarize_latency(std::span<const double> samples, int groups) {
  LatencySummary s;
  s.samples = samples.size();
  if (samples.empty()) return s;
  double total = 0;
  for (double v : samples) total += v;
  s.mean_ns = total / static_cast<double>(samples.size());
  const std::size_t g = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(groups, 1)), 1, samples.size());
  std::vector<double> means;
  for (std::size_t k = 0; k < g; ++k) {
    const std::size_t begin = k * samples.size() / g;
    const std::size_t end = (k + 1) * samples.size() / g;
    double acc = 0;
    for (std::size_t i = begin; i < end; ++i) acc += samples[i];
    means.push_back(acc / static_cast<double>(end - begin));
  }
  std::sort(means.begin(), means.end());
  const std::size_t mid = means.size() / 2;
  s.median_of_means_ns = means.size() % 2 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
  return s;
}

BenchResult bench_pair(const DecodeFn& baseline, const std::string& baseline_name, const DecodeFn& candidate,
                       const std::string& candidate_name, std::size_t examples, const BenchOptions& options) {
  if (examples == 0) raise(ErrorCode::kEmptyEval, "nothing to benchmark");
  for (int w = 0; w < options.warmup; ++w) {
    baseline(static_cast<std::size_t>(w) % examples);
    candidate(static_cast<std::size_t>(w) % examples);
  }
  BenchResult result;
  std::vector<double> base_ns, cand_ns;
  auto timed = [](const DecodeFn& fn, std::size_t i, int& length) {
    const auto start = std::chrono::steady_clock::now();
    length = fn(i);
    return static_cast<double>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count());
  };
  for (int r = 0; r < std::max(options.repeats, 1); ++r) {
    for (std::size_t i = 0; i < examples; ++i) {
      int length = 0;
      const double b = timed(baseline, i, length);
      base_ns.push_back(b);
      result.rows.push_back({baseline_name, i, length, b});
      const double c = timed(candidate, i, length);
      cand_ns.push_back(c);
      result.rows.push_back({candidate_name, i, length, c});
    }
  }
  result.baseline = summarize_latency(base_ns, options.groups);
  result.candidate = summarize_latency(cand_ns, options.groups);
  result.speedup = result.candidate.median_of_means_ns > 0
                       ? result.baseline.median_of_means_ns / result.candidate.median_of_means_ns
                       : 0.0;
  return result;
}

BenchResult bench_latency(const model::CnatModel<float>& nar, const model::CnatModel<float>& ar,
                          const std::vector<std::vector<int>>& inputs, const BenchOptions& options) {
  if (ar.config().mode != model::DecodeMode::kAutoregressive) {
    raise(ErrorCode::kInvalidArgument, "baseline model must be in autoregressive mode");
  }
  model::GenerateOptions gen;
  gen.forced_length = options.forced_length;
  DecodeFn ar_fn = [&](std::size_t i) {
    return static_cast<int>(ar.generate_autoregressive(inputs[i], gen).explanation.size());
  };
  DecodeFn nar_fn = [&](std::size_t i) { return static_cast<int>(nar.generate(inputs[i], gen).explanation.size()); };
  return bench_pair(ar_fn, "ar", nar_fn, "nar", inputs.size(), options);
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) raise(ErrorCode::kInvalidArgument, "line fit needs two or more points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) raise(ErrorCode::kInvalidArgument, "line fit needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

ScalingResult latency_scaling(const model::CnatModel<float>& nar, const model::CnatModel<float>& ar,
                              const std::vector<std::vector<int>>& inputs, std::span<const int> lengths,
                              BenchOptions options) {
  ScalingResult result;
  std::vector<double> xs, nar_ys, ar_ys;
  for (int len : lengths) {
    options.forced_length = len;
    const auto r = bench_latency(nar, ar, inputs, options);
    result.points.push_back({len, r.candidate.median_of_means_ns, r.baseline.median_of_means_ns});
    xs.push_back(len);
    nar_ys.push_back(r.candidate.median_of_means_ns);
    ar_ys.push_back(r.baseline.median_of_means_ns);
  }
  result.nar = fit_line(xs, nar_ys);
  result.ar = fit_line(xs, ar_ys);
  const double denom = std::abs(result.nar.slope);
  result.slope_ratio = denom > 0 ? result.ar.slope / denom : std::numeric_limits<double>::infinity();
  return result;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "mode,example,length,latency_ns\n";
  for (const auto& r : rows) out << r.mode << ',' << r.example << ',' << r.length << ',' << r.latency_ns << '\n';
}

}  // namespace cnat::evalkit
