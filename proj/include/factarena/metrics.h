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

// Report computations over a record pool: participation and validity
// counts, judge consistency tables and evolution difficulty curves.

#ifndef FACTARENA_METRICS_H_
#define FACTARENA_METRICS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "factarena/evolution.h"
#include "factarena/guidelines.h"
#include "factarena/judgment.h"
#include "factarena/pipeline.h"
#include "factarena/rating.h"
#include "factarena/storage.h"

namespace factarena {

struct PlanEntry {
  std::string claim_id;
  std::string model_a;
  std::string model_b;
};

// Typed view of a pool snapshot, in append order.
struct PoolView {
  std::vector<Claim> claims;
  std::vector<PipelineRun> runs;
  std::vector<ExtractionGuideline> extraction_guidelines;
  std::vector<EvidenceGuideline> evidence_guidelines;
  std::vector<PlanEntry> plan_entries;
  std::vector<Battle> battles;
  std::vector<JudgmentRecord> judgments;
  std::vector<BattleOutcome> outcomes;
  std::vector<EvolutionLineage> lineages;
  std::vector<RatingTable> rating_snapshots;

  // Outcomes that feed ratings: quorum met.
  std::vector<BattleOutcome> RatedOutcomes() const;
};

// kSchemaViolation (with the sequence number) on an unreadable payload.
PoolView ParsePool(std::span<const Record> records);

struct ModelParticipation {
  int64_t claims = 0;            // original claims with a valid run
  int64_t battles_original = 0;  // valid battles on original claims
  int64_t battles_evolved = 0;
  int64_t total() const { return battles_original + battles_evolved; }
};

struct ValidityStats {
  int64_t planned_battles = 0;    // plan entries
  int64_t scheduled_battles = 0;  // assembled battles
  int64_t valid_battles = 0;      // outcomes with quorum met
  int64_t judgments = 0;
  int64_t valid_judgments = 0;
  std::map<std::string, ModelParticipation> participation;
  std::map<std::string, int64_t> parse_failures_by_judge;
};

ValidityStats ComputeValidityStats(const PoolView& pool);

struct CurvePoint {
  int round = 0;  // 0 is the reversal
  int64_t claims = 0;
  int64_t valid_runs = 0;
  double accuracy = 0.0;  // percent over valid runs
  int64_t battles = 0;    // valid battles
};

struct EvolutionCurve {
  std::vector<CurvePoint> points;
};

// Over lineages whose root every participant solved. kNoEvolutionData when
// no lineage reached a reversal.
EvolutionCurve ComputeEvolutionCurve(const PoolView& pool);

std::string ParticipationTsv(const ValidityStats& stats);
std::string EvolutionCurveTsv(const EvolutionCurve& curve);
// One row per judge plus an average row, percentages per dimension.
std::string ConsistencyTsv(
    const std::map<std::string, JudgeConsistency>& consistency);

}  // namespace factarena

#endif  // FACTARENA_METRICS_H_
