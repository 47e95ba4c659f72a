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

#include "factarena/metrics.h"

#include <numeric>

#include <gtest/gtest.h>

#include "factarena/storage.h"
#include "factarena/text.h"
#include "test_util.h"

namespace factarena {
namespace {

using testing::MakeClaim;

PipelineRun MakeRun(const std::string& model, const std::string& claim,
                    bool correct, bool valid = true) {
  PipelineRun r;
  r.run_id = MakeRunId(model, claim);
  r.model_id = model;
  r.claim_id = claim;
  r.correct = correct;
  r.valid = valid;
  return r;
}

BattleOutcome MakeOutcome(const std::string& claim, const std::string& a,
                          const std::string& b, bool quorum) {
  BattleOutcome o;
  o.battle_id = MakeBattleId(claim, a, b);
  o.claim_id = claim;
  o.model_a = a;
  o.model_b = b;
  o.quorum_met = quorum;
  o.outcomes.fill(Outcome::kA);
  return o;
}

Claim Reversed(const std::string& root) {
  Claim c = MakeClaim(root + "~r0", "reversed", Verdict::kRefuted);
  c.source = ClaimSource::kEvolved;
  c.lineage = ClaimLineage{root, 0, LineageKind::kReversed};
  return c;
}

TEST(ValidityTest, DroppedBattlesAndHandshake) {
  PoolView pool;
  const std::vector<std::string> models = {"a", "b", "c", "d", "e"};
  int n = 0;
  for (int claim = 0; claim < 3; ++claim) {
    std::string id = "c" + std::to_string(claim);
    pool.claims.push_back(MakeClaim(id, "t", Verdict::kSupported));
    for (size_t i = 0; i < models.size(); ++i) {
      for (size_t j = i + 1; j < models.size(); ++j) {
        pool.plan_entries.push_back({id, models[i], models[j]});
        pool.outcomes.push_back(MakeOutcome(id, models[i], models[j], n >= 2));
        ++n;
      }
    }
  }
  ASSERT_EQ(n, 30);
  ValidityStats stats = ComputeValidityStats(pool);
  EXPECT_EQ(stats.planned_battles, 30);
  EXPECT_EQ(stats.valid_battles, 28);
  int64_t total = 0;
  for (const auto& [model, p] : stats.participation) total += p.total();
  EXPECT_EQ(total, 2 * stats.valid_battles);
  EXPECT_EQ(pool.RatedOutcomes().size(), 28u);
}

TEST(ValidityTest, OriginalAndEvolvedSplit) {
  PoolView pool;
  pool.claims = {MakeClaim("c", "t", Verdict::kSupported), Reversed("c")};
  pool.runs = {MakeRun("a", "c", true), MakeRun("b", "c", true),
               MakeRun("a", "c~r0", true), MakeRun("b", "c~r0", false, false)};
  pool.outcomes = {MakeOutcome("c", "a", "b", true),
                   MakeOutcome("c~r0", "a", "b", true)};
  JudgmentRecord good;
  good.battle_id = pool.outcomes[0].battle_id;
  good.judge_id = "j1";
  good.valid = true;
  JudgmentRecord bad = good;
  bad.judge_id = "j2";
  bad.valid = false;
  pool.judgments = {good, bad, bad};
  ValidityStats stats = ComputeValidityStats(pool);
  EXPECT_EQ(stats.participation.at("a").claims, 1);
  EXPECT_EQ(stats.participation.at("a").battles_original, 1);
  EXPECT_EQ(stats.participation.at("a").battles_evolved, 1);
  EXPECT_EQ(stats.participation.at("b").total(), 2);
  EXPECT_EQ(stats.judgments, 3);
  EXPECT_EQ(stats.valid_judgments, 1);
  EXPECT_EQ(stats.parse_failures_by_judge.at("j1"), 0);
  EXPECT_EQ(stats.parse_failures_by_judge.at("j2"), 2);
}

TEST(ValidityTest, EmptyPool) {
  ValidityStats stats = ComputeValidityStats(PoolView{});
  EXPECT_EQ(stats.planned_battles, 0);
  EXPECT_EQ(stats.valid_battles, 0);
  EXPECT_EQ(stats.judgments, 0);
  EXPECT_TRUE(stats.participation.empty());
  EXPECT_EQ(ParticipationTsv(stats),
            "Models\tClaim\tBattle(OC)\tBattle(EC)\tBattle(Total)\n");
}

TEST(ValidityTest, ParticipationTsvRows) {
  PoolView pool;
  pool.claims = {MakeClaim("c", "t", Verdict::kSupported)};
  pool.runs = {MakeRun("a", "c", true), MakeRun("b", "c", false)};
  pool.outcomes = {MakeOutcome("c", "a", "b", true)};
  EXPECT_EQ(ParticipationTsv(ComputeValidityStats(pool)),
            "Models\tClaim\tBattle(OC)\tBattle(EC)\tBattle(Total)\n"
            "a\t1\t1\t0\t1\n"
            "b\t1\t1\t0\t1\n");
}

EvolutionLineage Lineage(const std::string& root, int evolved_rounds,
                         LineageStatus status) {
  EvolutionLineage l;
  l.root_claim_id = root;
  l.stages.push_back({root, 0, StageKind::kOriginal, true});
  l.stages.push_back({root + "~r0", 0, StageKind::kReversed, true});
  for (int r = 1; r <= evolved_rounds; ++r) {
    l.stages.push_back({root + "~e" + std::to_string(r), r, StageKind::kEvolved, true});
  }
  l.status = status;
  return l;
}

TEST(EvolutionCurveTest, ReversalBreakingThirtyPercent) {
  PoolView pool;
  for (int i = 0; i < 10; ++i) {
    std::string root = "c" + std::to_string(i);
    pool.lineages.push_back(Lineage(root, 0, LineageStatus::kConverged));
    pool.runs.push_back(MakeRun("m", root + "~r0", i >= 3));
  }
  EvolutionCurve curve = ComputeEvolutionCurve(pool);
  ASSERT_EQ(curve.points.size(), 1u);
  EXPECT_EQ(curve.points[0].round, 0);
  EXPECT_EQ(curve.points[0].claims, 10);
  EXPECT_DOUBLE_EQ(curve.points[0].accuracy, 70.0);
}

TEST(EvolutionCurveTest, NoLineages) {
  PoolView pool;
  EXPECT_THROW(
      {
        try {
          ComputeEvolutionCurve(pool);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kNoEvolutionData);
          throw;
        }
      },
      Error);
  EvolutionLineage untriggered;
  untriggered.root_claim_id = "c";
  untriggered.stages.push_back({"c", 0, StageKind::kOriginal, false});
  untriggered.status = LineageStatus::kConverged;
  pool.lineages.push_back(untriggered);
  EXPECT_THROW(ComputeEvolutionCurve(pool), Error);
}

TEST(EvolutionCurveTest, CappedOnlyCoversEveryRound) {
  PoolView pool;
  for (int i = 0; i < 3; ++i) {
    std::string root = "c" + std::to_string(i);
    pool.lineages.push_back(Lineage(root, 3, LineageStatus::kCapped));
    for (const LineageStage& s : pool.lineages.back().stages) {
      pool.runs.push_back(MakeRun("m1", s.claim_id, true));
      pool.runs.push_back(MakeRun("m2", s.claim_id, true));
      pool.outcomes.push_back(MakeOutcome(s.claim_id, "m1", "m2", true));
    }
  }
  EvolutionCurve curve = ComputeEvolutionCurve(pool);
  ASSERT_EQ(curve.points.size(), 4u);
  for (int r = 0; r <= 3; ++r) {
    EXPECT_EQ(curve.points[r].round, r);
    EXPECT_EQ(curve.points[r].claims, 3);
    EXPECT_EQ(curve.points[r].valid_runs, 6);
    EXPECT_EQ(curve.points[r].battles, 3);
    EXPECT_DOUBLE_EQ(curve.points[r].accuracy, 100.0);
  }
  std::string tsv = EvolutionCurveTsv(curve);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')),
            "Round\tClaims\tValid Runs\tAccuracy(%)\tBattles");
  EXPECT_NE(tsv.find("\n3\t3\t6\t100.00\t3\n"), std::string::npos);
}

TEST(ConsistencyTsvTest, OneRowPerJudgePlusAverage) {
  std::map<std::string, JudgeConsistency> c;
  for (int i = 0; i < 4; ++i) {
    JudgeConsistency jc;
    jc.judge_id = "j" + std::to_string(i);
    jc.valid_votes = 10;
    jc.per_dimension.fill(0.25 * i);
    jc.overall = 0.25 * i;
    c[jc.judge_id] = jc;
  }
  JudgeConsistency silent;
  silent.judge_id = "quiet";
  c["quiet"] = silent;
  std::string tsv = ConsistencyTsv(c);
  std::vector<std::string> lines = text::SplitLines(tsv);
  lines.erase(std::remove(lines.begin(), lines.end(), ""), lines.end());
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0].rfind("Judge\tValid Votes\t", 0), 0u);
  EXPECT_EQ(lines.back().rfind("Avg.\t-\t37.50", 0), 0u);
  EXPECT_NE(lines[4].find("\t75.00"), std::string::npos);
  size_t tabs = std::count(lines[0].begin(), lines[0].end(), '\t');
  for (const std::string& line : lines) {
    EXPECT_EQ(static_cast<size_t>(std::count(line.begin(), line.end(), '\t')), tabs);
  }
}

TEST(ParsePoolTest, TypedViewFromRecords) {
  RecordPool store;
  store.Append(RecordKind::kClaim, MakeClaim("c", "t", Verdict::kSupported));
  store.Append(RecordKind::kRun, MakeRun("a", "c", true));
  store.Append(RecordKind::kPlanEntry,
               {{"claim_id", "c"}, {"model_a", "a"}, {"model_b", "b"}});
  store.Append(RecordKind::kOutcome, MakeOutcome("c", "a", "b", false));
  store.Append(RecordKind::kLineage, Lineage("c", 1, LineageStatus::kCapped));
  PoolView view = ParsePool(store.Snapshot());
  EXPECT_EQ(view.claims.size(), 1u);
  EXPECT_EQ(view.runs.size(), 1u);
  EXPECT_TRUE(view.runs[0].correct);
  EXPECT_EQ(view.plan_entries.size(), 1u);
  EXPECT_EQ(view.plan_entries[0].model_b, "b");
  EXPECT_EQ(view.outcomes.size(), 1u);
  EXPECT_TRUE(view.RatedOutcomes().empty());
  ASSERT_EQ(view.lineages.size(), 1u);
  EXPECT_EQ(view.lineages[0].stages.size(), 3u);
}

TEST(ParsePoolTest, BadPayloadNamesSequence) {
  Record r;
  r.seq = 12;
  r.kind = RecordKind::kRun;
  r.payload = {{"run_id", 5}};
  std::vector<Record> records = {r};
  try {
    ParsePool(records);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
    EXPECT_NE(std::string(e.what()).find("12"), std::string::npos);
  }
}

}  // namespace
}  // namespace factarena
