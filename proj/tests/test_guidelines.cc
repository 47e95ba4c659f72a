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

#include "factarena/guidelines.h"

#include <algorithm>
#include <regex>
#include <set>

#include <gtest/gtest.h>

#include "factarena/text.h"
#include "test_util.h"

namespace factarena {
namespace {

using testing::MakeClaim;
using testing::Spec;

const Claim kClaim = MakeClaim("C7", "Alpha is older than Beta.", Verdict::kSupported);

// Scripted judge that merges by taking every distinct "tok-*" marker in
// the prompt, in first-appearance order.
std::optional<std::string> MergeResponder(const ChatRequest& r) {
  static const std::regex kTok(R"(tok-\d+-\d+)");
  const std::string& prompt = r.messages.front().content;
  std::vector<std::string> seen;
  for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), kTok);
       it != std::sregex_iterator(); ++it) {
    if (std::find(seen.begin(), seen.end(), it->str()) == seen.end()) {
      seen.push_back(it->str());
    }
  }
  return "GUIDELINE:\n" + text::FormatNumberedList(seen);
}

std::vector<CandidateSet> Candidates(int n, int m) {
  std::vector<CandidateSet> out;
  for (int i = 0; i < n; ++i) {
    CandidateSet c;
    c.run_id = "run/model" + std::to_string(i) + "/C7";
    c.family = m >= 2 ? "jf" + std::to_string(i % (m + 1)) : "cand";
    c.sub_claims.claim_id = "C7";
    c.sub_claims.sub_claims = {"tok-" + std::to_string(i) + "-0",
                               "tok-" + std::to_string(i) + "-1"};
    out.push_back(c);
  }
  return out;
}

std::vector<ModelSpec> Panel(int m) {
  std::vector<ModelSpec> out;
  for (int k = 0; k < m; ++k) {
    out.push_back(Spec("judge" + std::to_string(k), "jf" + std::to_string(k)));
  }
  return out;
}

TEST(ConsolidationTest, RotationCompletenessProperty) {
  for (int n = 1; n <= 8; ++n) {
    for (int m = 1; m <= 4; ++m) {
      for (uint64_t seed : {1u, 2u, 3u}) {
        Gateway g;
        auto judge = std::make_shared<ScriptedProvider>(
            std::map<std::string, std::string>{}, "", MergeResponder);
        g.AddProvider("scripted", judge);
        auto candidates = Candidates(n, m);
        auto panel = Panel(m);
        ExtractionGuideline gl = ConsolidateExtractionGuideline(
            g, Templates::Defaults(), kClaim, candidates, panel, seed);
        std::set<std::string> all;
        for (const auto& c : candidates) all.insert(c.run_id);
        EXPECT_EQ(gl.incorporated_sources, all) << n << "," << m;
        EXPECT_EQ(gl.version, n - 1);
        EXPECT_EQ(gl.editor_history.size(), static_cast<size_t>(n - 1));
        EXPECT_EQ(judge->call_count(), static_cast<size_t>(n - 1));
        std::set<std::string> edited(gl.edit_sources.begin(), gl.edit_sources.end());
        EXPECT_EQ(edited.size(), gl.edit_sources.size());
        EXPECT_EQ(edited.count(gl.initial_source), 0u);
        auto items = text::ParseNumberedList(gl.text);
        EXPECT_EQ(items.size(), static_cast<size_t>(2 * n));
        std::set<std::string> distinct(items.begin(), items.end());
        EXPECT_EQ(distinct.size(), items.size());
        for (size_t e = 0; e < gl.editor_history.size(); ++e) {
          const std::string& judge_id = gl.editor_history[e];
          const std::string& family =
              std::find_if(panel.begin(), panel.end(),
                           [&](const ModelSpec& s) { return s.id == judge_id; })
                  ->family;
          const auto& source = *std::find_if(
              candidates.begin(), candidates.end(),
              [&](const CandidateSet& c) { return c.run_id == gl.edit_sources[e]; });
          EXPECT_NE(family, source.family);
        }
      }
    }
  }
}

TEST(ConsolidationTest, SingleCandidateIsVerbatim) {
  Gateway g;
  auto judge = std::make_shared<ScriptedProvider>(
      std::map<std::string, std::string>{}, "", MergeResponder);
  g.AddProvider("scripted", judge);
  auto candidates = Candidates(1, 2);
  ExtractionGuideline gl = ConsolidateExtractionGuideline(
      g, Templates::Defaults(), kClaim, candidates, Panel(2), 4);
  EXPECT_EQ(gl.text, "1. tok-0-0\n2. tok-0-1");
  EXPECT_EQ(gl.version, 0);
  EXPECT_EQ(judge->call_count(), 0u);
}

TEST(ConsolidationTest, SkipsOwnFamilyJudge) {
  Gateway g;
  g.AddProvider("scripted", std::make_shared<ScriptedProvider>(
                                std::map<std::string, std::string>{}, "",
                                MergeResponder));
  std::vector<ModelSpec> panel{Spec("J1", "fam1"), Spec("J2", "fam2"),
                               Spec("J3", "fam3")};
  std::vector<CandidateSet> candidates = Candidates(3, 2);
  for (auto& c : candidates) c.family = "fam2";
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    ExtractionGuideline gl = ConsolidateExtractionGuideline(
        g, Templates::Defaults(), kClaim, candidates, panel, seed);
    EXPECT_EQ(gl.version, 2);
    for (const std::string& editor : gl.editor_history) EXPECT_NE(editor, "J2");
  }
}

TEST(ConsolidationTest, ParseFailureHandsRoundToNextJudge) {
  Gateway g;
  g.AddProvider("scripted", std::make_shared<ScriptedProvider>(
                                std::map<std::string, std::string>{
                                    {"bad/consolidate:*", "no list here"}},
                                "", MergeResponder));
  std::vector<ModelSpec> panel{Spec("bad", "x"), Spec("good", "y")};
  ExtractionGuideline gl = ConsolidateExtractionGuideline(
      g, Templates::Defaults(), kClaim, Candidates(4, 1), panel, 2);
  EXPECT_EQ(gl.version, 3);
  for (const std::string& editor : gl.editor_history) EXPECT_EQ(editor, "good");
}

TEST(ConsolidationTest, Errors) {
  Gateway g;
  g.AddProvider("scripted", std::make_shared<ScriptedProvider>(
                                std::map<std::string, std::string>{}, "",
                                MergeResponder));
  std::vector<CandidateSet> none;
  EXPECT_THROW(ConsolidateExtractionGuideline(g, Templates::Defaults(), kClaim,
                                              none, Panel(2), 1),
               Error);
  std::vector<ModelSpec> same{Spec("J", "cand")};
  try {
    ConsolidateExtractionGuideline(g, Templates::Defaults(), kClaim,
                                   Candidates(3, 1), same, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyPanel);
  }
}

TEST(ConsolidationTest, RoundCaps) {
  Gateway g;
  g.AddProvider("scripted", std::make_shared<ScriptedProvider>(
                                std::map<std::string, std::string>{}, "",
                                MergeResponder));
  ConsolidationOptions capped;
  capped.max_rounds = 2;
  EXPECT_EQ(ConsolidateExtractionGuideline(g, Templates::Defaults(), kClaim,
                                           Candidates(8, 3), Panel(3), 1, capped)
                .version,
            2);
  ConsolidationOptions six;
  six.early_stop_at_six = true;
  EXPECT_EQ(ConsolidateExtractionGuideline(g, Templates::Defaults(), kClaim,
                                           Candidates(8, 3), Panel(3), 1, six)
                .version,
            6);
}

TEST(ConsolidationTest, PromptsAreBlinded) {
  Gateway g;
  auto judge = std::make_shared<ScriptedProvider>(
      std::map<std::string, std::string>{}, "", MergeResponder);
  g.AddProvider("scripted", judge);
  ConsolidateExtractionGuideline(g, Templates::Defaults(), kClaim,
                                 Candidates(5, 3), Panel(3), 9);
  for (const ChatRequest& r : judge->Transcript()) {
    EXPECT_EQ(r.messages[0].content.find("model"), std::string::npos);
    EXPECT_EQ(r.messages[0].content.find("run/"), std::string::npos);
  }
}

struct WikiHarness {
  explicit WikiHarness(std::string entities,
                       std::map<std::string, std::string> pages, bool up = true) {
    gateway.AddProvider("scripted",
                        std::make_shared<ScriptedProvider>(
                            std::map<std::string, std::string>{
                                {"entities:*", std::move(entities)}},
                            ""));
    gateway.SetWikiBackend(std::make_shared<ScriptedWiki>(std::move(pages), up));
  }
  Gateway gateway{GatewayOptions{}, std::make_shared<FakeClock>()};
};

TEST(EvidenceGuidelineTest, BothFound) {
  WikiHarness h("- A\n- B", {{"A", "About A."}, {"B", "About B."}});
  EvidenceGuideline g =
      BuildEvidenceGuideline(h.gateway, Templates::Defaults(), kClaim, Spec("j", "f"));
  EXPECT_EQ(g.pages_found, 2);
  EXPECT_EQ(g.reference_text, "About A.\n\nAbout B.");
  EXPECT_FALSE(g.fallback);
  EXPECT_FALSE(EvidenceGuideline::kIsGold);
}

TEST(EvidenceGuidelineTest, OneMissing) {
  WikiHarness h("- A\n- B", {{"B", "About B."}});
  EvidenceGuideline g =
      BuildEvidenceGuideline(h.gateway, Templates::Defaults(), kClaim, Spec("j", "f"));
  EXPECT_EQ(g.pages_found, 1);
  EXPECT_EQ(g.reference_text, "About B.");
}

TEST(EvidenceGuidelineTest, NoEntities) {
  WikiHarness h("NONE", {{"A", "About A."}});
  EvidenceGuideline g =
      BuildEvidenceGuideline(h.gateway, Templates::Defaults(), kClaim, Spec("j", "f"));
  EXPECT_EQ(g.pages_found, 0);
  EXPECT_TRUE(g.reference_text.empty());
  EXPECT_TRUE(g.fallback);
}

TEST(EvidenceGuidelineTest, WikiDown) {
  WikiHarness h("- A", {{"A", "About A."}}, false);
  EvidenceGuideline g =
      BuildEvidenceGuideline(h.gateway, Templates::Defaults(), kClaim, Spec("j", "f"));
  EXPECT_EQ(g.pages_found, 0);
  EXPECT_TRUE(g.reference_text.empty());
  EXPECT_TRUE(g.fallback);
}

TEST(EvidenceGuidelineTest, CapDropsWholeSummariesFromTheEnd) {
  WikiHarness h("- A\n- B\n- C", {{"A", std::string(30, 'a')},
                                  {"B", std::string(30, 'b')},
                                  {"C", std::string(30, 'c')}});
  EvidenceGuideline g = BuildEvidenceGuideline(h.gateway, Templates::Defaults(),
                                               kClaim, Spec("j", "f"), 70);
  EXPECT_EQ(g.reference_text, std::string(30, 'a') + "\n\n" + std::string(30, 'b'));
  EXPECT_EQ(g.pages_found, 3);
}

TEST(RubricTest, FixedCriteria) {
  const JustificationRubric& r = GetJustificationRubric();
  ASSERT_EQ(r.criteria.size(), 4u);
  EXPECT_EQ(r.criteria[0].name, "Helpfulness");
  EXPECT_EQ(r.criteria[1].name, "Informativeness");
  EXPECT_EQ(r.criteria[2].name, "Soundness");
  EXPECT_EQ(r.criteria[3].name, "Readability");
  EXPECT_TRUE(GetJustificationRubric() == r);
  for (const auto& c : r.criteria) EXPECT_FALSE(c.definition.empty());
}

TEST(GuidelineJsonTest, RoundTrip) {
  ExtractionGuideline g;
  g.claim_id = "C1";
  g.version = 2;
  g.text = "1. a";
  g.initial_source = "r0";
  g.incorporated_sources = {"r0", "r1", "r2"};
  g.editor_history = {"j1", "j2"};
  g.edit_sources = {"r1", "r2"};
  ExtractionGuideline back = nlohmann::json(g).get<ExtractionGuideline>();
  EXPECT_EQ(back.incorporated_sources, g.incorporated_sources);
  EXPECT_EQ(back.editor_history, g.editor_history);
  EXPECT_EQ(back.version, 2);

  EvidenceGuideline e;
  e.claim_id = "C1";
  e.entities = {"A"};
  e.reference_text = "About A.";
  e.pages_found = 1;
  EvidenceGuideline eb = nlohmann::json(e).get<EvidenceGuideline>();
  EXPECT_EQ(eb.reference_text, e.reference_text);
  EXPECT_EQ(eb.pages_found, 1);
}

}  // namespace
}  // namespace factarena
