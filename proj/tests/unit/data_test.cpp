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
#include <fstream>
#include <set>
#include <sstream>

#include "cnat/data/config_file.hpp"
#include "cnat/data/dataset_io.hpp"
#include "cnat/data/synthetic.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/error.hpp"
#include "cnat/tokens.hpp"

namespace {

using namespace cnat::data;

std::vector<std::string> words(const std::string& text) { return tokenize_words(text); }

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

// Label from the segments alone: hypothesis facts inside the premise entail;
// a hypothesis value whose inventory already has a different value in the
// premise contradicts; any other new fact is neutral. Function words such as
// "is" carry no fact.
int nli_oracle(const Example& ex, const SyntheticTaskConfig& c) {
  const auto premise = words(ex.segment_a);
  const auto hyp = words(*ex.segment_b);
  bool contradiction = false, novel = false;
  for (const auto& w : hyp) {
    if (contains(premise, w)) continue;
    for (const auto* inv : {&c.attributes, &c.verbs, &c.locations}) {
      if (!contains(*inv, w)) continue;
      const bool premise_has_other =
          std::any_of(inv->begin(), inv->end(), [&](const std::string& v) { return v != w && contains(premise, v); });
      (premise_has_other ? contradiction : novel) = true;
    }
  }
  if (contradiction) return 1;
  return novel ? 2 : 0;
}

// A marriage between the two marked names, stated directly.
int spouse_oracle(const Example& ex) {
  const auto& t = ex.segment_a;
  if (t.find("never married") != std::string::npos) return 0;
  const auto second = t.find("<e>", 1);
  const std::string between = t.substr(0, second);
  for (const char* cue : {" married ", " wed ", " her husband ", " the wife of "}) {
    if (between.find(cue) != std::string::npos) return 1;
  }
  return t.find("later married") != std::string::npos || t.find("got married") != std::string::npos ? 1 : 0;
}

TEST(Synthetic, SizesBalanceAndDeterminism) {
  const auto c = SyntheticTaskConfig::nli(3);
  const auto a = generate_synthetic(c);
  const auto b = generate_synthetic(c);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.train.size(), 2048u);
  EXPECT_EQ(a.val.size(), 256u);
  EXPECT_EQ(a.test.size(), 256u);
  std::vector<int> counts(3);
  for (const auto& ex : a.train) ++counts[static_cast<std::size_t>(*ex.label)];
  for (int n : counts) EXPECT_NEAR(n / 2048.0, 1.0 / 3.0, 0.05);
  EXPECT_NE(generate_synthetic(SyntheticTaskConfig::nli(4)).train, a.train);
}

TEST(Synthetic, NliLabelsFollowTheRules) {
  const auto c = SyntheticTaskConfig::nli(8);
  const auto s = generate_synthetic(c);
  for (const auto* split : {&s.train, &s.val, &s.test}) {
    for (const auto& ex : *split) ASSERT_EQ(nli_oracle(ex, c), *ex.label) << ex.segment_a << " | " << *ex.segment_b;
  }
}

TEST(Synthetic, SpouseLabelsFollowTheRules) {
  const auto s = generate_synthetic(SyntheticTaskConfig::spouse(8));
  for (const auto& ex : s.train) {
    ASSERT_EQ(spouse_oracle(ex), *ex.label) << ex.segment_a;
    EXPECT_FALSE(ex.segment_b.has_value());
    EXPECT_FALSE(ex.alignment.empty());
  }
}

TEST(Synthetic, InfeasibleConfigsRaise) {
  auto c = SyntheticTaskConfig::nli(1);
  c.attributes.clear();
  c.verbs = {"sits"};
  c.locations = {"inside"};
  EXPECT_THROW(generate_synthetic(c), cnat::Error);
  auto s = SyntheticTaskConfig::spouse(1);
  s.names = {"a", "b", "c"};
  EXPECT_THROW(generate_synthetic(s), cnat::Error);
  auto tiny = SyntheticTaskConfig::nli(1);
  tiny.train_size = 4;
  tiny.balance_tolerance = 0.01;
  EXPECT_THROW(generate_synthetic(tiny), cnat::Error);
}

TEST(Vocab, NormalizesAndMapsUnknowns) {
  const auto v = Vocab::build(std::vector<std::string>{"a cat sits", "a dog"});
  EXPECT_EQ(v.tokenize("A cat Sits"), (std::vector<int>{v.id("a"), v.id("cat"), v.id("sits")}));
  EXPECT_EQ(v.tokenize("zebra")[0], cnat::kUnkId);
  EXPECT_EQ(v.id("a"), cnat::kNumSpecialTokens);  // most frequent first
  EXPECT_EQ(v.detokenize(v.tokenize("a dog sits")), "a dog sits");
}

TEST(Vocab, SaveLoadRoundTrip) {
  const auto v = Vocab::build(std::vector<std::string>{"b a c a", "c"});
  const std::string path = ::testing::TempDir() + "/vocab.txt";
  v.save(path);
  const auto w = Vocab::load(path);
  EXPECT_EQ(w.tokens(), v.tokens());
}

TEST(EncodeInput, SeparatorBetweenSegments) {
  Example ex;
  ex.segment_a = "a cat";
  ex.segment_b = "a dog";
  const auto v = Vocab::build(std::vector<Example>{ex});
  EXPECT_EQ(encode_input(ex, v), (std::vector<int>{v.id("a"), v.id("cat"), cnat::kSepId, v.id("a"), v.id("dog")}));
}

TEST(Alignment, PointsAtFirstOccurrence) {
  Example ex;
  ex.segment_a = "the red cat";
  ex.segment_b = "the cat";
  ex.explanation = "red cat maybe";
  EXPECT_EQ(align_explanation(ex), (std::vector<int>{1, 2, 2}));
}

TEST(DatasetIo, RoundTripKeepsEveryField) {
  auto data = generate_synthetic(SyntheticTaskConfig::nli(2)).val;
  data[0].provenance = Provenance::kPseudo;
  data[1].label.reset();
  data[1].explanation.reset();
  data[1].alignment.clear();
  std::stringstream buf;
  write_dataset(buf, data);
  EXPECT_EQ(read_dataset(buf), data);
}

TEST(DatasetIo, MalformedLineNamesLineNumber) {
  const auto data = generate_synthetic(SyntheticTaskConfig::spouse(2)).val;
  std::stringstream buf;
  write_dataset(buf, std::vector<Example>(data.begin(), data.begin() + 3));
  std::string text = buf.str();
  text.resize(text.size() - 20);  // truncate the third record
  std::istringstream in(text);
  try {
    read_dataset(in);
    FAIL();
  } catch (const cnat::Error& e) {
    EXPECT_EQ(e.code(), cnat::ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
  std::istringstream missing("{\"id\": \"x\", \"provenance\": \"human\"}\n");
  EXPECT_THROW(read_dataset(missing), cnat::Error);
}

TEST(ConfigFile, SectionsAndComments) {
  const auto c = ConfigFile::parse("top = 1\n# note\n[train]\nsteps = 40\nlr = 0.5\n[train]\nseed=3\n");
  EXPECT_EQ(c.get_int("top", 0), 1);
  EXPECT_EQ(c.get_int("train.steps", 0), 40);
  EXPECT_DOUBLE_EQ(c.get_double("train.lr", 0), 0.5);
  EXPECT_EQ(c.get_or("train.seed", ""), "3");
  EXPECT_EQ(c.sections(), (std::vector<std::string>{"train"}));
  EXPECT_FALSE(c.get("missing").has_value());
}

}  // namespace
