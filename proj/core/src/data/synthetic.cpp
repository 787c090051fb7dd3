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

#include "cnat/data/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>

#include "cnat/error.hpp"
#include "cnat/numcore/rng.hpp"

namespace cnat::data {
namespace {

using num::Rng;

template <typename V>
const typename V::value_type& pick(const V& items, Rng& rng) {
  return items[static_cast<std::size_t>(rng.uniform_int(items.size()))];
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// ---------------------------------------------------------------- NLI ----

enum FactType { kAttr = 0, kVerb = 1, kLoc = 2 };

struct Scene {
  std::string entity;
  std::array<std::optional<std::string>, 3> facts;
};

std::vector<std::string> render(const Scene& s) {
  std::vector<std::string> words = {"the"};
  if (s.facts[kAttr]) words.push_back(*s.facts[kAttr]);
  words.push_back(s.entity);
  if (s.facts[kVerb]) {
    words.push_back(*s.facts[kVerb]);
  } else if (s.facts[kLoc]) {
    words.push_back("is");
  }
  if (s.facts[kLoc]) words.push_back(*s.facts[kLoc]);
  return words;
}

class NliGenerator {
 public:
  explicit NliGenerator(const SyntheticTaskConfig& c) : c_(c) {
    inventories_ = {&c.attributes, &c.verbs, &c.locations};
  }

  void check_feasible() const {
    if (c_.entities.empty()) raise(ErrorCode::kBalanceInfeasible, "nli task needs at least one entity");
    int usable = 0;
    bool can_contradict = false;
    for (const auto* inv : inventories_) {
      if (!inv->empty()) ++usable;
      if (inv->size() >= 2) can_contradict = true;
    }
    if (usable == 0) raise(ErrorCode::kBalanceInfeasible, "nli task needs at least one fact inventory");
    if (!can_contradict) raise(ErrorCode::kBalanceInfeasible, "contradiction needs an inventory with two values");
    if (usable < 2) raise(ErrorCode::kBalanceInfeasible, "neutral needs two fact inventories");
  }

  Example make(int label, Rng& rng) const {
    Scene premise;
    premise.entity = pick(c_.entities, rng);
    std::vector<int> usable;
    for (int t = 0; t < 3; ++t) {
      if (!inventories_[t]->empty()) usable.push_back(t);
    }
    // Premise fact types: a random nonempty subset, constrained so the label
    // is expressible.
    for (;;) {
      premise.facts = {};
      for (int t : usable) {
        if (rng.bernoulli(0.65)) premise.facts[t] = pick(*inventories_[t], rng);
      }
      int present = 0, missing = 0, contradictable = 0;
      for (int t : usable) {
        if (premise.facts[t]) {
          ++present;
          if (inventories_[t]->size() >= 2) ++contradictable;
        } else {
          ++missing;
        }
      }
      if (present == 0) continue;
      if (label == 1 && contradictable == 0) continue;
      if (label == 2 && missing == 0) continue;
      break;
    }

    Scene hyp;
    hyp.entity = premise.entity;
    std::vector<int> present;
    for (int t = 0; t < 3; ++t) {
      if (premise.facts[t]) present.push_back(t);
    }
    int focus = -1;
    if (label == 0) {
      for (;;) {
        for (int t : present) {
          if (rng.bernoulli(0.5)) hyp.facts[t] = premise.facts[t];
        }
        if (std::any_of(hyp.facts.begin(), hyp.facts.end(), [](const auto& f) { return f.has_value(); })) break;
      }
      for (int t = 0; t < 3 && focus < 0; ++t) {
        if (hyp.facts[t]) focus = t;
      }
    } else if (label == 1) {
      std::vector<int> options;
      for (int t : present) {
        if (inventories_[t]->size() >= 2) options.push_back(t);
      }
      focus = pick(options, rng);
      const auto& inv = *inventories_[focus];
      std::string value;
      do {
        value = pick(inv, rng);
      } while (value == *premise.facts[focus]);
      hyp.facts[focus] = value;
      for (int t : present) {
        if (t != focus && rng.bernoulli(0.4)) hyp.facts[t] = premise.facts[t];
      }
    } else {
      std::vector<int> options;
      for (int t : usable) {
        if (!premise.facts[t]) options.push_back(t);
      }
      focus = pick(options, rng);
      hyp.facts[focus] = pick(*inventories_[focus], rng);
      for (int t : present) {
        if (rng.bernoulli(0.4)) hyp.facts[t] = premise.facts[t];
      }
    }

    std::vector<std::string> words = {"the", premise.entity};
    if (label == 0) {
      words.insert(words.end(), {*hyp.facts[focus], "is", "stated"});
    } else if (label == 1) {
      words.insert(words.end(), {"cannot", "be", "both", *premise.facts[focus], "and", *hyp.facts[focus]});
    } else {
      words.insert(words.end(), {"might", "not", "be", *hyp.facts[focus]});
    }

    Example ex;
    ex.segment_a = join(render(premise));
    ex.segment_b = join(render(hyp));
    ex.label = label;
    ex.explanation = join(words);
    ex.alignment = align_explanation(ex);
    return ex;
  }

 private:
  const SyntheticTaskConfig& c_;
  std::array<const std::vector<std::string>*, 3> inventories_{};
};

// ------------------------------------------------------------- Spouse ----

const std::vector<std::string> kTails = {"", "", "last year", "in june", "in paris", "at the lake", "years ago"};
const std::vector<std::string> kRelations = {"friends", "colleagues", "cousins", "neighbors"};
const std::vector<std::string> kSiblings = {"sister", "brother", "friend", "colleague", "cousin"};
const std::vector<std::string> kCasual = {"met", "knows", "visited", "called"};

class SpouseGenerator {
 public:
  explicit SpouseGenerator(const SyntheticTaskConfig& c) : c_(c) {}

  void check_feasible() const {
    std::set<std::string> distinct(c_.names.begin(), c_.names.end());
    if (distinct.size() < 4) raise(ErrorCode::kBalanceInfeasible, "spouse task needs four distinct names");
  }

  Example make(int label, Rng& rng) const {
    std::vector<std::string> people;
    while (people.size() < 4) {
      const auto& n = pick(c_.names, rng);
      if (std::find(people.begin(), people.end(), n) == people.end()) people.push_back(n);
    }
    const std::string& a = people[0];
    const std::string& b = people[1];
    const std::string e1 = "<e> " + a;
    const std::string e2 = "<e> " + b;
    const std::string& tail = pick(kTails, rng);
    std::string text;
    if (label == 1) {
      switch (rng.uniform_int(6)) {
        case 0: text = e1 + " married " + e2; break;
        case 1: text = e1 + " and her husband " + e2; break;
        case 2: text = e1 + " is the wife of " + e2; break;
        case 3: text = e1 + " wed " + e2; break;
        case 4: text = e1 + " met " + e2 + " and later married " + (rng.bernoulli(0.5) ? "him" : "her"); break;
        default: text = e1 + " and " + e2 + " got married"; break;
      }
    } else {
      const std::string distractor = people[2] + (rng.bernoulli(0.5) ? " married " : " wed ") + people[3];
      switch (rng.uniform_int(6)) {
        case 0: text = e1 + " " + pick(kCasual, rng) + " " + e2; break;
        case 1: text = e1 + " never married " + e2; break;
        case 2: text = e1 + " is the " + pick(kSiblings, rng) + " of " + e2; break;
        case 3: text = e1 + " " + pick(kCasual, rng) + " " + e2 + " while " + distractor; break;
        case 4: text = e1 + " and " + e2 + " are " + pick(kRelations, rng); break;
        default: text = e1 + " met " + e2 + " after " + distractor; break;
      }
    }
    if (!tail.empty()) text += " " + tail;

    std::vector<std::string> words = {a, "and", b, "are"};
    if (label == 0) words.push_back("not");
    words.push_back("married");

    Example ex;
    ex.segment_a = text;
    ex.label = label;
    ex.explanation = join(words);
    ex.alignment = align_explanation(ex);
    return ex;
  }

 private:
  const SyntheticTaskConfig& c_;
};

void check_balance(int size, int labels, double tolerance, const char* split) {
  if (size <= 0) return;
  const double target = 1.0 / labels;
  const double lo = static_cast<double>(size / labels) / size;
  const double hi = static_cast<double>((size + labels - 1) / labels) / size;
  if (target - lo > tolerance + 1e-12 || hi - target > tolerance + 1e-12) {
    raise(ErrorCode::kBalanceInfeasible, std::string(split) + " split of " + std::to_string(size) +
                                             " cannot hold " + std::to_string(labels) + " labels within tolerance");
  }
}

template <typename Gen>
std::vector<Example> make_split(const Gen& gen, int size, int labels, const std::string& prefix, Rng rng) {
  std::vector<int> order(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) order[static_cast<std::size_t>(i)] = i % labels;
  rng.shuffle(order);
  std::vector<Example> out;
  out.reserve(order.size());
  for (int i = 0; i < size; ++i) {
    auto ex = gen.make(order[static_cast<std::size_t>(i)], rng);
    char id[32];
    std::snprintf(id, sizeof id, "-%05d", i);
    ex.id = prefix + id;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

std::string to_string(TaskFamily family) { return family == TaskFamily::kNli ? "nli" : "spouse"; }

TaskFamily task_family_from_string(const std::string& text) {
  if (text == "nli") return TaskFamily::kNli;
  if (text == "spouse" || text == "sp") return TaskFamily::kSpouse;
  raise(ErrorCode::kInvalidArgument, "unknown task family '" + text + "'");
}

int label_count(TaskFamily family) { return family == TaskFamily::kNli ? 3 : 2; }

const std::vector<std::string>& label_names(TaskFamily family) {
  static const std::vector<std::string> nli = {"entailment", "contradiction", "neutral"};
  static const std::vector<std::string> sp = {"no", "spouse"};
  return family == TaskFamily::kNli ? nli : sp;
}

SyntheticTaskConfig SyntheticTaskConfig::nli(std::uint64_t seed) {
  SyntheticTaskConfig c;
  c.family = TaskFamily::kNli;
  c.entities = {"cat", "dog", "bird", "horse", "man", "woman", "child", "girl", "boy", "cow"};
  c.attributes = {"red", "blue", "green", "black", "white", "brown", "yellow", "gray"};
  c.verbs = {"sits", "runs", "sleeps", "eats", "jumps", "swims", "walks", "plays"};
  c.locations = {"outside", "inside", "upstairs", "downstairs", "nearby"};
  c.seed = seed;
  return c;
}

SyntheticTaskConfig SyntheticTaskConfig::spouse(std::uint64_t seed) {
  SyntheticTaskConfig c;
  c.family = TaskFamily::kSpouse;
  c.names = {"alice", "bob",  "carol", "dave", "eve",  "frank",  "grace", "henry",
             "iris",  "jack", "kate",  "liam", "mia",  "noah",   "olivia", "paul"};
  c.seed = seed;
  return c;
}

DatasetSplits generate_synthetic(const SyntheticTaskConfig& config) {
  const int labels = label_count(config.family);
  check_balance(config.train_size, labels, config.balance_tolerance, "train");
  check_balance(config.val_size, labels, config.balance_tolerance, "val");
  check_balance(config.test_size, labels, config.balance_tolerance, "test");
  Rng root(config.seed);
  Rng train_rng = root.fork();
  Rng val_rng = root.fork();
  Rng test_rng = root.fork();
  const std::string family = to_string(config.family);
  DatasetSplits out;
  auto run = [&](const auto& gen) {
    gen.check_feasible();
    out.train = make_split(gen, config.train_size, labels, family + "-train", train_rng);
    out.val = make_split(gen, config.val_size, labels, family + "-val", val_rng);
    out.test = make_split(gen, config.test_size, labels, family + "-test", test_rng);
  };
  if (config.family == TaskFamily::kNli) {
    run(NliGenerator(config));
  } else {
    run(SpouseGenerator(config));
  }
  return out;
}

}  // namespace cnat::data
