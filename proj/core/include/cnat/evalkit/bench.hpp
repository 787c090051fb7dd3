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

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnat/model/cnat_model.hpp"

namespace cnat::evalkit {

struct LatencySummary {
  double mean_ns = 0;
  /// Samples split into consecutive groups; median of the group means.
  double median_of_means_ns = 0;
  std::size_t samples = 0;
};

LatencySummary summarize_latency(std::span<const double> samples_ns, int groups);

struct BenchOptions {
  int warmup = 10;
  int repeats = 3;  // timed runs per example
  int groups = 5;
  /// Fixes the explanation length of every decode.
  std::optional<int> forced_length;
};

struct BenchRow {
  std::string mode;
  std::size_t example = 0;
  int length = 0;
  double latency_ns = 0;
};

struct BenchResult {
  LatencySummary baseline;   // "ar" for bench_latency
  LatencySummary candidate;  // "nar" for bench_latency
  /// baseline / candidate, on medians of means.
  double speedup = 0;
  std::vector<BenchRow> rows;
};

/// One decode of example i; returns the emitted length. Timed from outside
/// with a monotonic clock.
using DecodeFn = std::function<int(std::size_t example)>;

/// Interleaves the two callables example by example, single-threaded,
/// after `warmup` untimed calls of each.
BenchResult bench_pair(const DecodeFn& baseline, const std::string& baseline_name, const DecodeFn& candidate,
                       const std::string& candidate_name, std::size_t examples, const BenchOptions& options);

/// generate() on `nar` against generate_autoregressive() on `ar`, batch size
/// one. Raises InvalidArgument unless `ar` is in autoregressive mode.
BenchResult bench_latency(const model::CnatModel<float>& nar, const model::CnatModel<float>& ar,
                          const std::vector<std::vector<int>>& inputs, const BenchOptions& options);

struct LineFit {
  double slope = 0;
  double intercept = 0;
};

/// Least-squares line. Raises InvalidArgument with fewer than two points.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

struct ScalingPoint {
  int length = 0;
  double nar_ns = 0;
  double ar_ns = 0;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  LineFit nar;
  LineFit ar;
  /// ar.slope / |nar.slope| (infinite for a flat NAR line).
  double slope_ratio = 0;
};

/// Latency against forced explanation length for both decoders.
ScalingResult latency_scaling(const model::CnatModel<float>& nar, const model::CnatModel<float>& ar,
                              const std::vector<std::vector<int>>& inputs, std::span<const int> lengths,
                              BenchOptions options);

/// mode,example,length,latency_ns rows with a header line.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace cnat::evalkit
