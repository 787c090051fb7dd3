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

#include "cnat/weaksup/label_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cnat/error.hpp"

namespace cnat::weaksup {
namespace {

void check_votes(const VoteMatrix& votes, std::size_t lfs, int num_labels) {
  for (const auto& row : votes) {
    if (row.size() != lfs) raise(ErrorCode::kShapeMismatch, "vote rows have different lengths");
    for (int v : row) {
      if (v != kAbstain && (v < 0 || v >= num_labels)) {
        raise(ErrorCode::kInvalidArgument, "vote " + std::to_string(v) + " outside the label range");
      }
    }
  }
}

// Distinct vote rows with multiplicities; all-abstain rows contribute
// nothing and are dropped.
struct Patterns {
  std::vector<std::vector<int>> rows;
  std::vector<double> counts;
  double items = 1;
};

Patterns compress(const VoteMatrix& votes) {
  std::map<std::vector<int>, double> seen;
  for (const auto& row : votes) {
    if (std::any_of(row.begin(), row.end(), [](int v) { return v != kAbstain; })) seen[row] += 1;
  }
  Patterns p;
  for (auto& [row, count] : seen) {
    p.rows.push_back(row);
    p.counts.push_back(count);
  }
  p.items = votes.empty() ? 1.0 : static_cast<double>(votes.size());
  return p;
}

// Mean log-likelihood and, when grad is given, its gradient.
double evaluate(const Patterns& pats, std::span<const double> w, int K, std::vector<double>* grad) {
  const std::size_t M = w.size();
  if (grad) grad->assign(M, 0.0);
  std::vector<double> log_right(M), log_wrong(M);
  for (std::size_t m = 0; m < M; ++m) {
    log_right[m] = std::log(w[m]);
    log_wrong[m] = std::log((1.0 - w[m]) / (K - 1));
  }
  std::vector<double> log_joint(static_cast<std::size_t>(K));
  double total = 0;
  for (std::size_t r = 0; r < pats.rows.size(); ++r) {
    const auto& row = pats.rows[r];
    for (int y = 0; y < K; ++y) {
      double lj = -std::log(static_cast<double>(K));
      for (std::size_t m = 0; m < M; ++m) {
        if (row[m] != kAbstain) lj += row[m] == y ? log_right[m] : log_wrong[m];
      }
      log_joint[static_cast<std::size_t>(y)] = lj;
    }
    const double mx = *std::max_element(log_joint.begin(), log_joint.end());
    double z = 0;
    for (double lj : log_joint) z += std::exp(lj - mx);
    total += pats.counts[r] * (mx + std::log(z));
    if (!grad) continue;
    for (std::size_t m = 0; m < M; ++m) {
      if (row[m] == kAbstain) continue;
      const double right = std::exp(log_joint[static_cast<std::size_t>(row[m])] - mx) / z;
      (*grad)[m] += pats.counts[r] * (right / w[m] - (1.0 - right) / (1.0 - w[m]));
    }
  }
  if (grad) {
    for (auto& g : *grad) g /= pats.items;
  }
  return total / pats.items;
}

template <typename Project>
double ascend(const Patterns& pats, std::vector<double>& w, int K, const LabelModelConfig& config,
              const Project& project, int& iterations) {
  const std::size_t M = w.size();
  std::vector<double> grad;
  std::vector<double> trial(M);
  double value = evaluate(pats, w, K, &grad);
  double step = 0.1;
  for (iterations = 0; iterations < config.max_iterations; ++iterations) {
    bool accepted = false;
    double moved = 0;
    while (step > 1e-14) {
      for (std::size_t m = 0; m < M; ++m) trial[m] = w[m] + step * grad[m];
      project(trial);
      double ascent = 0;
      moved = 0;
      for (std::size_t m = 0; m < M; ++m) {
        ascent += grad[m] * (trial[m] - w[m]);
        moved = std::max(moved, std::abs(trial[m] - w[m]));
      }
      if (moved == 0) break;
      const double v = evaluate(pats, trial, K, nullptr);
      if (v >= value + 1e-4 * ascent) {
        w = trial;
        value = evaluate(pats, w, K, &grad);
        step *= 1.5;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || moved < config.tolerance) break;
  }
  return value;
}

// Hill climb on the lattice min + k * step. Sweeps optimize each weight and
// each pair of weights exhaustively with the others fixed; when no block
// improves, the full +-1 neighbourhood (up to 8 free weights) is tried.
void lattice_refine(const Patterns& pats, std::vector<double>& w, const std::vector<bool>& frozen, int K,
                    const LabelModelConfig& config) {
  const std::size_t M = w.size();
  const double step = config.resolution;
  const int top = static_cast<int>(std::floor((config.max_weight - config.min_weight) / step + 1e-9));
  std::vector<std::size_t> active;
  for (std::size_t m = 0; m < M; ++m) {
    if (!frozen[m]) active.push_back(m);
  }
  std::vector<int> k(M, 0);
  auto weight_at = [&](int idx) { return config.min_weight + idx * step; };
  for (std::size_t m : active) {
    k[m] = std::clamp(static_cast<int>(std::lround((w[m] - config.min_weight) / step)), 0, top);
    w[m] = weight_at(k[m]);
  }
  double current = evaluate(pats, w, K, nullptr);
  std::vector<double> cand;
  auto try_move = [&](const std::vector<std::pair<std::size_t, int>>& target) {
    cand = w;
    for (const auto& [m, idx] : target) cand[m] = weight_at(idx);
    const double v = evaluate(pats, cand, K, nullptr);
    if (v <= current + 1e-12) return false;
    current = v;
    w = cand;
    for (const auto& [m, idx] : target) k[m] = idx;
    return true;
  };
  for (;;) {
    bool improved = false;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const std::size_t m = active[i];
      for (int a = 0; a <= top; ++a) improved |= try_move({{m, a}});
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const std::size_t n = active[j];
        for (int a = 0; a <= top; ++a) {
          for (int b = 0; b <= top; ++b) improved |= try_move({{m, a}, {n, b}});
        }
      }
    }
    if (improved) continue;
    if (active.size() < 3 || active.size() > 8) break;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < active.size(); ++i) combos *= 3;
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<std::pair<std::size_t, int>> target;
      std::size_t code = c;
      bool inside = true;
      for (std::size_t m : active) {
        const int idx = k[m] + static_cast<int>(code % 3) - 1;
        code /= 3;
        if (idx < 0 || idx > top) inside = false;
        target.emplace_back(m, idx);
      }
      if (inside && try_move(target)) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
}

}  // namespace

double marginal_log_likelihood(const VoteMatrix& votes, std::span<const double> weights, int num_labels) {
  if (num_labels < 2) raise(ErrorCode::kInvalidArgument, "label model needs at least two labels");
  check_votes(votes, weights.size(), num_labels);
  return evaluate(compress(votes), weights, num_labels, nullptr);
}

LabelModelResult learn_weights(const VoteMatrix& votes, const LabelModelConfig& config) {
  const int K = config.num_labels;
  if (K < 2) raise(ErrorCode::kInvalidArgument, "label model needs at least two labels");
  if (!(config.min_weight > 0 && config.min_weight <= config.max_weight && config.max_weight < 1)) {
    raise(ErrorCode::kInvalidArgument, "weight bounds must satisfy 0 < min <= max < 1");
  }
  const std::size_t M = votes.empty() ? 0 : votes.front().size();
  check_votes(votes, M, K);

  LabelModelResult result;
  result.never_votes.assign(M, true);
  for (const auto& row : votes) {
    for (std::size_t m = 0; m < M; ++m) {
      if (row[m] != kAbstain) result.never_votes[m] = false;
    }
  }
  if (std::all_of(result.never_votes.begin(), result.never_votes.end(), [](bool b) { return b; })) {
    raise(ErrorCode::kInvalidArgument, "no labeling function voted on any example");
  }
  const Patterns pats = compress(votes);
  auto project = [&](std::vector<double>& x) {
    for (std::size_t m = 0; m < M; ++m) {
      x[m] = result.never_votes[m] ? 0.5 : std::clamp(x[m], config.min_weight, config.max_weight);
    }
  };

  // Starts: every LF at the initial weight, then each LF alone raised and
  // alone lowered, since the likelihood can have several local maxima.
  const double lo = config.min_weight + 0.25 * (config.max_weight - config.min_weight);
  const double hi = config.min_weight + 0.75 * (config.max_weight - config.min_weight);
  std::vector<std::vector<double>> starts(1, std::vector<double>(M, config.initial_weight));
  for (std::size_t m = 0; m < M && M > 1; ++m) {
    starts.emplace_back(M, lo)[m] = hi;
    starts.emplace_back(M, hi)[m] = lo;
  }
  std::vector<double> w;
  double best = -std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    project(start);
    int used = 0;
    const double v = ascend(pats, start, K, config, project, used);
    result.iterations += used;
    if (v > best + 1e-12) {
      best = v;
      w = start;
    }
  }

  if (config.resolution > 0) {
    lattice_refine(pats, w, result.never_votes, K, config);
  } else {
    for (auto& x : w) x = std::round(x * 1e6) / 1e6;
  }
  result.weights = w;
  result.log_likelihood = evaluate(pats, w, K, nullptr);
  return result;
}

int aggregate(std::span<const int> votes, std::span<const double> weights, int num_labels) {
  if (votes.size() != weights.size()) raise(ErrorCode::kShapeMismatch, "votes and weights differ in length");
  std::vector<double> score(static_cast<std::size_t>(num_labels), 0.0);
  std::vector<bool> voted(static_cast<std::size_t>(num_labels), false);
  bool any = false;
  for (std::size_t m = 0; m < votes.size(); ++m) {
    if (votes[m] == kAbstain) continue;
    if (votes[m] < 0 || votes[m] >= num_labels) raise(ErrorCode::kInvalidArgument, "vote outside the label range");
    score[static_cast<std::size_t>(votes[m])] += weights[m];
    voted[static_cast<std::size_t>(votes[m])] = true;
    any = true;
  }
  if (!any) return kAbstain;
  int best = -1;
  for (int y = 0; y < num_labels; ++y) {
    if (!voted[static_cast<std::size_t>(y)]) continue;
    if (best < 0 || score[static_cast<std::size_t>(y)] > score[static_cast<std::size_t>(best)] + 1e-9) best = y;
  }
  return best;
}

}  // namespace cnat::weaksup
