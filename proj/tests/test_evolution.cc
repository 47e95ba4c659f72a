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

#include "factarena/evolution.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace factarena {
namespace {

using Script = std::map<std::string, std::string>;
using testing::MakeClaim;
using testing::Spec;

struct Harness {
  explicit Harness(Script script)
      : provider(std::make_shared<ScriptedProvider>(std::move(script), "")) {
    gateway.AddProvider("scripted", provider);
  }
  Gateway gateway{GatewayOptions{}, std::make_shared<FakeClock>()};
  std::shared_ptr<ScriptedProvider> provider;
  Templates templates = Templates::Defaults();
  ModelSpec evolver = Spec("evo", "fe");
};

const Claim kRoot =
    MakeClaim("C", "Patrick Carpentier raced in CART.", Verdict::kSupported);

WeaknessAnalysis SomeAnalysis(const std::string& claim_id) {
  WeaknessAnalysis a;
  a.claim_id = claim_id;
  a.answers.push_back({"m1", "Supported. fine"});
  a.weaknesses.push_back({"m1", "(j) missed the date"});
  return a;
}

Correctness AllRight(const std::vector<std::string>& models) {
  Correctness c;
  for (const auto& m : models) c[m] = true;
  return c;
}

const std::vector<std::string> kModels = {"m1", "m2", "m3"};

// Answers for each claim id, defaulting to everyone correct.
EvolutionHooks ScriptedHooks(std::map<std::string, Correctness> answers,
                             std::vector<std::string>* processed = nullptr) {
  EvolutionHooks hooks;
  hooks.process = [answers, processed](const Claim& c,
                                       const std::vector<std::string>& models) {
    if (processed) processed->push_back(c.claim_id);
    auto it = answers.find(c.claim_id);
    return it == answers.end() ? AllRight(models) : it->second;
  };
  hooks.analyze = [](const Claim& c) { return SomeAnalysis(c.claim_id); };
  return hooks;
}

Script EvolverScript() {
  return {{"reverse:*", "CLAIM: Patrick Carpentier never raced in CART."},
          {"evolve:*", "CLAIM: A harder variant of the claim."}};
}

void ExpectLabelAlgebra(const Claim& root, const EvolutionLineage& lineage) {
  std::map<std::string, Claim> by_id{{root.claim_id, root}};
  for (const Claim& c : lineage.created) by_id[c.claim_id] = c;
  for (const Claim& c : lineage.created) {
    ASSERT_TRUE(c.lineage.has_value());
    const Claim& parent = by_id.at(c.lineage->parent_id);
    if (c.lineage->kind == LineageKind::kReversed) {
      EXPECT_EQ(c.gold_verdict, Flip(parent.gold_verdict));
    } else {
      EXPECT_EQ(c.gold_verdict, parent.gold_verdict);
    }
  }
}

TEST(EvolverReplyTest, Grammar) {
  auto r = ParseEvolverReply("Here you go.\nCLAIM: Something new.\n");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->claim_text, "Something new.");
  EXPECT_FALSE(r->label_drift);
  auto drift = ParseEvolverReply("**Claim:** X\nLABEL_DRIFT: yes");
  ASSERT_TRUE(drift);
  EXPECT_TRUE(drift->label_drift);
  EXPECT_FALSE(ParseEvolverReply("no claim here"));
  EXPECT_FALSE(ParseEvolverReply("CLAIM:   "));
}

TEST(EvolverReplyTest, Ids) {
  EXPECT_EQ(ReversedClaimId("c1"), "c1~r0");
  EXPECT_EQ(EvolvedClaimId("c1", 2), "c1~e2");
}

TEST(ReverseClaimTest, FlipsGoldAndSetsLineage) {
  Harness h(EvolverScript());
  for (Verdict gold : {Verdict::kSupported, Verdict::kRefuted}) {
    Claim root = MakeClaim("C", "Patrick Carpentier raced in CART.", gold);
    Claim r = ReverseClaim(h.gateway, h.templates, root, h.evolver, "C");
    EXPECT_EQ(r.gold_verdict, Flip(gold));
    EXPECT_EQ(r.claim_id, "C~r0");
    EXPECT_EQ(r.source, ClaimSource::kEvolved);
    ASSERT_TRUE(r.lineage);
    EXPECT_EQ(r.lineage->parent_id, "C");
    EXPECT_EQ(r.lineage->round, 0);
    EXPECT_EQ(r.lineage->kind, LineageKind::kReversed);
  }
}

TEST(ReverseClaimTest, EchoIsRetriedOnceThenDegenerate) {
  Harness h(Script{{"reverse:C", "CLAIM: patrick carpentier raced in cart"}});
  try {
    ReverseClaim(h.gateway, h.templates, kRoot, h.evolver, "C");
    FAIL() << "expected DegenerateReversal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateReversal);
  }
  EXPECT_EQ(h.provider->call_count(), 2u);
}

TEST(ReverseClaimTest, GibberishIsParseError) {
  Harness h(Script{{"reverse:C", "I would rather not."}});
  try {
    ReverseClaim(h.gateway, h.templates, kRoot, h.evolver, "C");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
  EXPECT_EQ(h.provider->call_count(), 3u);
}

TEST(EvolveClaimTest, PreservesGoldAndRound) {
  Harness h(EvolverScript());
  Claim reversed = ReverseClaim(h.gateway, h.templates, kRoot, h.evolver, "C");
  EvolvedVariant v1 = EvolveClaim(h.gateway, h.templates, reversed,
                                  SomeAnalysis(reversed.claim_id), h.evolver,
                                  "C", 1);
  EvolvedVariant v2 = EvolveClaim(h.gateway, h.templates, v1.claim,
                                  SomeAnalysis(v1.claim.claim_id), h.evolver,
                                  "C", 2);
  EXPECT_EQ(v1.claim.gold_verdict, reversed.gold_verdict);
  EXPECT_EQ(v2.claim.gold_verdict, reversed.gold_verdict);
  std::vector<int> rounds = {reversed.lineage->round, v1.claim.lineage->round,
                             v2.claim.lineage->round};
  EXPECT_EQ(rounds, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(v2.claim.lineage->parent_id, v1.claim.claim_id);
  EXPECT_EQ(v2.claim.lineage->kind, LineageKind::kEvolved);
  EXPECT_FALSE(v1.label_drift);
}

TEST(EvolveClaimTest, PromptCarriesAnalysis) {
  Harness h(EvolverScript());
  EvolveClaim(h.gateway, h.templates, kRoot, SomeAnalysis("C"), h.evolver, "C", 1);
  auto transcript = h.provider->Transcript();
  ASSERT_EQ(transcript.size(), 1u);
  std::string prompt = transcript[0].messages.back().content;
  EXPECT_NE(prompt.find("missed the date"), std::string::npos);
  EXPECT_NE(prompt.find(kRoot.text), std::string::npos);
}

TEST(EvolveClaimTest, RejectsBadArguments) {
  Harness h(EvolverScript());
  auto code = [&](int round, const WeaknessAnalysis& a) {
    try {
      EvolveClaim(h.gateway, h.templates, kRoot, a, h.evolver, "C", round);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kParseError;
  };
  EXPECT_EQ(code(0, SomeAnalysis("C")), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code(1, WeaknessAnalysis{}), ErrorCode::kInvalidArgument);
  EXPECT_EQ(h.provider->call_count(), 0u);
}

TEST(EvolveLineageTest, ConvergesAtRoundOne) {
  Harness h(EvolverScript());
  EvolutionHooks hooks = ScriptedHooks(
      {{"C~e1", {{"m1", true}, {"m2", false}, {"m3", true}}}});
  EvolutionLineage l = EvolveLineage(h.gateway, h.templates, kRoot,
                                     AllRight(kModels), kModels, hooks,
                                     {h.evolver, 3, 2});
  ASSERT_EQ(l.stages.size(), 3u);
  EXPECT_EQ(l.stages[0].kind, StageKind::kOriginal);
  EXPECT_EQ(l.stages[1].kind, StageKind::kReversed);
  EXPECT_EQ(l.stages[2].kind, StageKind::kEvolved);
  EXPECT_EQ(l.stages[2].round, 1);
  EXPECT_FALSE(l.stages[2].unanimous_correct);
  EXPECT_EQ(l.status, LineageStatus::kConverged);
  EXPECT_EQ(l.evolver_id, "evo");
  ExpectLabelAlgebra(kRoot, l);
}

TEST(EvolveLineageTest, CappedAfterMaxRounds) {
  Harness h(EvolverScript());
  std::vector<std::string> processed;
  EvolutionLineage l =
      EvolveLineage(h.gateway, h.templates, kRoot, AllRight(kModels), kModels,
                    ScriptedHooks({}, &processed), {h.evolver, 3, 2});
  EXPECT_EQ(l.status, LineageStatus::kCapped);
  ASSERT_EQ(l.stages.size(), 5u);
  EXPECT_EQ(l.stages.back().round, 3);
  EXPECT_EQ(processed,
            (std::vector<std::string>{"C~r0", "C~e1", "C~e2", "C~e3"}));
  EXPECT_EQ(l.created.size(), 4u);
  ExpectLabelAlgebra(kRoot, l);
}

TEST(EvolveLineageTest, NoTriggerWithOneIncorrectModel) {
  Harness h(EvolverScript());
  EvolutionLineage l = EvolveLineage(
      h.gateway, h.templates, kRoot, {{"m1", true}, {"m2", false}, {"m3", true}},
      kModels, ScriptedHooks({}), {h.evolver, 3, 2});
  EXPECT_EQ(l.stages.size(), 1u);
  EXPECT_TRUE(l.created.empty());
  EXPECT_EQ(h.provider->call_count(), 0u);
}

TEST(EvolveLineageTest, ReversalThatBreaksAModelConverges) {
  Harness h(EvolverScript());
  EvolutionLineage l = EvolveLineage(
      h.gateway, h.templates, kRoot, AllRight(kModels), kModels,
      ScriptedHooks({{"C~r0", {{"m1", false}, {"m2", true}, {"m3", true}}}}),
      {h.evolver, 3, 2});
  EXPECT_EQ(l.stages.size(), 2u);
  EXPECT_EQ(l.status, LineageStatus::kConverged);
}

TEST(EvolveLineageTest, LabelDriftIsQuarantined) {
  Script script = EvolverScript();
  script["evolve:C~r0"] = "CLAIM: Something else entirely.\nLABEL_DRIFT: yes";
  Harness h(script);
  EvolutionLineage l =
      EvolveLineage(h.gateway, h.templates, kRoot, AllRight(kModels), kModels,
                    ScriptedHooks({}), {h.evolver, 3, 2});
  EXPECT_EQ(l.status, LineageStatus::kCapped);
  EXPECT_TRUE(l.HasFlag("LabelDriftSuspected"));
  ASSERT_EQ(l.quarantined.size(), 1u);
  EXPECT_EQ(l.created.size(), 1u);
}

TEST(EvolveLineageTest, DegenerateReversalCapsLineage) {
  Harness h(Script{{"reverse:C", "CLAIM: Patrick Carpentier raced in CART."}});
  EvolutionLineage l =
      EvolveLineage(h.gateway, h.templates, kRoot, AllRight(kModels), kModels,
                    ScriptedHooks({}), {h.evolver, 3, 2});
  EXPECT_EQ(l.status, LineageStatus::kCapped);
  EXPECT_TRUE(l.HasFlag("DegenerateReversal"));
  EXPECT_EQ(l.stages.size(), 1u);
}

TEST(EvolveLineageTest, RepeatedParseErrorCaps) {
  Harness h(Script{{"reverse:*", "CLAIM: Reversed."}, {"evolve:*", "nonsense"}});
  EvolutionLineage l =
      EvolveLineage(h.gateway, h.templates, kRoot, AllRight(kModels), kModels,
                    ScriptedHooks({}), {h.evolver, 3, 2});
  EXPECT_EQ(l.status, LineageStatus::kCapped);
  EXPECT_TRUE(l.HasFlag("EvolverParseError"));
}

// Termination and label algebra across every trigger pattern up to the cap.
TEST(EvolveLineageTest, TerminationProperty) {
  for (int max_rounds = 0; max_rounds <= 4; ++max_rounds) {
    for (int fail_at = 0; fail_at <= max_rounds + 1; ++fail_at) {
      Harness h(EvolverScript());
      std::map<std::string, Correctness> answers;
      std::string failing =
          fail_at == 0 ? "C~r0" : EvolvedClaimId("C", fail_at);
      answers[failing] = {{"m1", false}, {"m2", true}, {"m3", true}};
      EvolutionLineage l = EvolveLineage(h.gateway, h.templates, kRoot,
                                         AllRight(kModels), kModels,
                                         ScriptedHooks(answers),
                                         {h.evolver, max_rounds, 2});
      EXPECT_NE(l.status, LineageStatus::kActive);
      EXPECT_LE(static_cast<int>(l.stages.size()) - 1, max_rounds + 1);
      bool converged = fail_at <= max_rounds;
      EXPECT_EQ(l.status == LineageStatus::kConverged, converged)
          << max_rounds << " " << fail_at;
      ExpectLabelAlgebra(kRoot, l);
    }
  }
}

TEST(WeaknessAnalysisTest, UsesOnlyOwnRecords) {
  PipelineRun r1;
  r1.claim_id = "C";
  r1.model_id = "m1";
  r1.verification.verdict = Verdict::kSupported;
  r1.verification.justification = "Sources agree.";
  PipelineRun r2 = r1;
  r2.model_id = "m2";
  r2.verification.verdict = Verdict::kRefuted;
  PipelineRun other = r1;
  other.claim_id = "D";
  PipelineRun invalid = r1;
  invalid.model_id = "m3";
  invalid.valid = false;
  std::vector<PipelineRun> runs = {r2, r1, other, invalid};

  Battle b;
  b.battle_id = MakeBattleId("C", "m1", "m2");
  b.claim_id = "C";
  b.model_a = "m1";
  b.model_b = "m2";
  Battle elsewhere = b;
  elsewhere.battle_id = MakeBattleId("D", "m1", "m2");
  elsewhere.claim_id = "D";

  JudgmentRecord j;
  j.battle_id = b.battle_id;
  j.judge_id = "j1";
  j.valid = true;
  j.vote.rationale = "m2 ignored the second source.";
  j.vote.outcomes.fill(Outcome::kA);
  JudgmentRecord foreign = j;
  foreign.battle_id = elsewhere.battle_id;
  foreign.vote.rationale = "unrelated";
  JudgmentRecord broken = j;
  broken.valid = false;
  broken.vote.rationale = "should not appear";

  WeaknessAnalysis a = BuildWeaknessAnalysis(
      "C", runs, std::vector<Battle>{b, elsewhere},
      std::vector<JudgmentRecord>{j, foreign, broken});
  ASSERT_EQ(a.answers.size(), 2u);
  EXPECT_EQ(a.answers[0].model_id, "m1");
  ASSERT_EQ(a.weaknesses.size(), 1u);
  EXPECT_EQ(a.weaknesses[0].model_id, "m2");
  EXPECT_NE(a.weaknesses[0].text.find("second source"), std::string::npos);
  EXPECT_EQ(a.source_judgments, std::vector<std::string>{b.battle_id});
}

TEST(WeaknessAnalysisTest, TieBlamesBoth) {
  Battle b;
  b.battle_id = "bt";
  b.claim_id = "C";
  b.model_a = "m1";
  b.model_b = "m2";
  JudgmentRecord j;
  j.battle_id = "bt";
  j.judge_id = "j";
  j.valid = true;
  j.vote.rationale = "Both weak.";
  j.vote.outcomes.fill(Outcome::kTie);
  WeaknessAnalysis a = BuildWeaknessAnalysis("C", {}, std::vector<Battle>{b},
                                             std::vector<JudgmentRecord>{j});
  EXPECT_EQ(a.weaknesses.size(), 2u);
  EXPECT_TRUE(BuildWeaknessAnalysis("Z", {}, std::vector<Battle>{b},
                                    std::vector<JudgmentRecord>{j})
                  .empty());
}

TEST(LineageJsonTest, RoundTrip) {
  Harness h(EvolverScript());
  EvolutionLineage l =
      EvolveLineage(h.gateway, h.templates, kRoot, AllRight(kModels), kModels,
                    ScriptedHooks({}), {h.evolver, 2, 2});
  nlohmann::json j = l;
  EvolutionLineage back = j.get<EvolutionLineage>();
  EXPECT_EQ(back.root_claim_id, "C");
  EXPECT_EQ(back.status, l.status);
  ASSERT_EQ(back.stages.size(), l.stages.size());
  for (size_t i = 0; i < l.stages.size(); ++i) {
    EXPECT_EQ(back.stages[i].claim_id, l.stages[i].claim_id);
    EXPECT_EQ(back.stages[i].kind, l.stages[i].kind);
    EXPECT_EQ(back.stages[i].round, l.stages[i].round);
  }
  EXPECT_EQ(j.at("status"), "capped");
}

}  // namespace
}  // namespace factarena
