// Copyright 2026 The FactArena Authors
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

#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "factarena/common.h"
#include "factarena/hash.h"
#include "factarena/templates.h"
#include "factarena/text.h"
#include "test_util.h"

namespace factarena {
namespace {

TEST(CommonTest, NamesRoundTrip) {
  for (Dimension d : kAllDimensions) {
    EXPECT_EQ(ParseDimensionName(DimensionName(d)), d);
  }
  EXPECT_EQ(DimensionLabel(Dimension::kClaimExtraction), "Claim Extraction");
  EXPECT_EQ(DimensionShortKey(Dimension::kOverall), "OV");
  for (Verdict v : {Verdict::kSupported, Verdict::kRefuted}) {
    EXPECT_EQ(ParseVerdictName(VerdictName(v)), v);
    EXPECT_EQ(Flip(Flip(v)), v);
    EXPECT_NE(Flip(v), v);
  }
  for (Outcome o : {Outcome::kA, Outcome::kB, Outcome::kTie}) {
    EXPECT_EQ(ParseOutcomeName(OutcomeName(o)), o);
  }
  EXPECT_FALSE(ParseDimensionName("Nope").has_value());
}

TEST(CommonTest, Scores) {
  EXPECT_EQ(ScoreForA(Outcome::kA), 1.0);
  EXPECT_EQ(ScoreForA(Outcome::kB), 0.0);
  EXPECT_EQ(ScoreForA(Outcome::kTie), 0.5);
}

TEST(CommonTest, ErrorCarriesCode) {
  Error e(ErrorCode::kPoolTooSmall, "x");
  EXPECT_EQ(e.code(), ErrorCode::kPoolTooSmall);
  EXPECT_EQ(ErrorCodeName(ErrorCode::kPoolTooSmall), "PoolTooSmall");
}

TEST(RngTest, DeterministicAndInRange) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    uint64_t x = a.UniformInt(7);
    EXPECT_EQ(x, b.UniformInt(7));
    EXPECT_LT(x, 7u);
    double u = a.Uniform01();
    EXPECT_EQ(u, b.Uniform01());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RngTest, ShuffleIsPermutation) {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  Rng rng(9);
  rng.Shuffle(v);
  std::multiset<int> seen(v.begin(), v.end());
  EXPECT_EQ(seen, (std::multiset<int>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(RngTest, DeriveSeedSeparatesTags) {
  EXPECT_EQ(DeriveSeed(1, "a"), DeriveSeed(1, "a"));
  EXPECT_NE(DeriveSeed(1, "a"), DeriveSeed(1, "b"));
  EXPECT_NE(DeriveSeed(1, "a"), DeriveSeed(2, "a"));
}

TEST(HashTest, KnownVectors) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(TextTest, Basics) {
  EXPECT_EQ(text::Trim("  a b \n"), "a b");
  EXPECT_EQ(text::ToLower("AbC"), "abc");
  EXPECT_EQ(text::ToUpper("AbC"), "ABC");
  EXPECT_EQ(text::SplitLines("a\nb\r\nc"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(text::StartsWith("prefix", "pre"));
  EXPECT_EQ(text::Join({"a", "b"}, ", "), "a, b");
}

TEST(TextTest, FillTemplate) {
  EXPECT_EQ(text::FillTemplate("{a} and {b} and {c}", {{"a", "1"}, {"b", "{a}"}}),
            "1 and {a} and {c}");
}

TEST(TextTest, NormalizeForComparison) {
  EXPECT_EQ(text::NormalizeForComparison("  Hello,   World! "), "hello world");
  EXPECT_EQ(text::NormalizeForComparison("Don't\tStop."), "dont stop");
}

TEST(TextTest, NumberedList) {
  EXPECT_EQ(text::ParseNumberedList("1. X was born in 1971. 2. X raced in series S."),
            (std::vector<std::string>{"X was born in 1971.", "X raced in series S."}));
  EXPECT_EQ(text::ParseNumberedList("1) one\n2) two\n3) three").size(), 3u);
  EXPECT_TRUE(text::ParseNumberedList("no list here").empty());
  auto items = text::ParseNumberedList("1. It sold 3. 5 million copies");
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(text::FormatNumberedList({"a", "b"}), "1. a\n2. b");
}

TEST(TextTest, BulletList) {
  EXPECT_EQ(text::ParseBulletList("- a\n* b\nplain\n- c"),
            (std::vector<std::string>{"a", "b", "c"}));
}

TEST(TemplatesTest, DefaultsHavePlaceholders) {
  Templates t = Templates::Defaults();
  EXPECT_NE(t.extract.find("{claim}"), std::string::npos);
  EXPECT_NE(t.evidence.find("{web_context}"), std::string::npos);
  EXPECT_NE(t.verify.find("{evidence}"), std::string::npos);
  EXPECT_NE(t.judge.find("{assistant_2_block}"), std::string::npos);
  EXPECT_NE(t.evolve.find("{judge_rationales}"), std::string::npos);
  EXPECT_EQ(TemplateNames().size(), 9u);
}

TEST(TemplatesTest, WriteAndOverride) {
  testing::TempDir dir;
  WriteDefaultTemplates(dir.path());
  Templates loaded = LoadTemplates(dir.path());
  EXPECT_EQ(loaded.judge, Templates::Defaults().judge);
  testing::WriteText(dir / "extract.txt", "Split {claim} please.");
  EXPECT_EQ(LoadTemplates(dir.path()).extract, "Split {claim} please.");
  EXPECT_EQ(LoadTemplates({}).verify, Templates::Defaults().verify);
}

}  // namespace
}  // namespace factarena
