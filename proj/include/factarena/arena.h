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

// The arena: composes pipeline runs, guidelines, battles, evolution and
// ratings into resumable phases over one record pool.

#ifndef FACTARENA_ARENA_H_
#define FACTARENA_ARENA_H_

#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "factarena/config.h"
#include "factarena/evolution.h"
#include "factarena/gateway.h"
#include "factarena/guidelines.h"
#include "factarena/judgment.h"
#include "factarena/pipeline.h"
#include "factarena/rating.h"
#include "factarena/scheduler.h"
#include "factarena/storage.h"
#include "factarena/templates.h"

namespace factarena {

// Runs fn(i) for every i in [0, n) on up to `workers` threads and returns
// the exception (if any) raised for each index.
std::vector<std::exception_ptr> ParallelFor(
    size_t n, int workers, const std::function<void(size_t)>& fn);

// Builds a gateway with the providers and backends a config names.
std::shared_ptr<Gateway> MakeGateway(const RunConfig& cfg);

struct RateResult {
  DimensionTables bradley_terry;
  DimensionTables elo;
  Leaderboard leaderboard;  // in the configured method
  Leaderboard bradley_terry_board;
  Leaderboard elo_board;
};

class Arena {
 public:
  explicit Arena(RunConfig cfg);
  Arena(RunConfig cfg, std::shared_ptr<Gateway> gateway);

  // Each phase skips work the pool already records.
  void Ingest();
  void Run();
  void Guideline();
  void Judge();
  void Evolve();
  RateResult Rate(bool append_snapshots = true);
  void Report();
  void RunAll();

  TournamentPlan Plan() const;

  const RunConfig& config() const { return cfg_; }
  Gateway& gateway() { return *gateway_; }
  RecordPool& pool() { return *pool_; }

 private:
  void LoadState();
  void CheckManifest();
  void MarkPhase(const std::string& phase);

  void AppendClaim(const Claim& claim);
  void EnsurePlanEntries(const ClaimSchedule& schedule);
  void RunSchedules(const std::vector<ClaimSchedule>& schedules);
  void GuidelinesFor(const std::vector<ClaimSchedule>& schedules);
  void BattlesFor(const std::vector<ClaimSchedule>& schedules);
  Correctness CorrectnessFor(const std::string& claim_id,
                             const std::vector<std::string>& models) const;
  WeaknessAnalysis AnalysisFor(const std::string& claim_id) const;
  std::vector<BattleOutcome> RatingInputs() const;
  std::vector<std::string> ModelIds() const;
  std::vector<std::string> OriginalClaimIds() const;

  RunConfig cfg_;
  std::shared_ptr<Gateway> gateway_;
  Templates templates_;
  std::unique_ptr<FactCheckPipeline> pipeline_;
  std::unique_ptr<RecordPool> pool_;

  std::map<std::string, Claim> claims_;
  std::vector<std::string> claim_order_;
  std::map<std::string, PipelineRun> runs_;
  std::map<std::string, ExtractionGuideline> extraction_;
  std::map<std::string, EvidenceGuideline> evidence_;
  std::set<std::string> plan_entries_;
  std::map<std::string, Battle> battles_;
  std::map<std::string, std::map<std::string, JudgmentRecord>> judgments_;
  std::map<std::string, BattleOutcome> outcomes_;
  std::vector<std::string> outcome_order_;
  std::map<std::string, EvolutionLineage> lineages_;
  std::map<std::string, nlohmann::json> latest_snapshot_;
};

}  // namespace factarena

#endif  // FACTARENA_ARENA_H_
