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

#include <iomanip>
#include <set>
#include <sstream>

#include "factarena/common.h"

namespace factarena {

namespace {

std::string Percent(double fraction_or_percent) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << fraction_or_percent;
  return out.str();
}

}  // namespace

std::vector<BattleOutcome> PoolView::RatedOutcomes() const {
  std::vector<BattleOutcome> rated;
  for (const BattleOutcome& o : outcomes) {
    if (o.quorum_met) rated.push_back(o);
  }
  return rated;
}

PoolView ParsePool(std::span<const Record> records) {
  PoolView view;
  for (const Record& r : records) {
    try {
      const nlohmann::json& p = r.payload;
      switch (r.kind) {
        case RecordKind::kClaim:
          view.claims.push_back(p.get<Claim>());
          break;
        case RecordKind::kRun:
          view.runs.push_back(p.get<PipelineRun>());
          break;
        case RecordKind::kGuideline:
          if (p.at("type") == "extraction") {
            view.extraction_guidelines.push_back(p.get<ExtractionGuideline>());
          } else {
            view.evidence_guidelines.push_back(p.get<EvidenceGuideline>());
          }
          break;
        case RecordKind::kPlanEntry:
          view.plan_entries.push_back({p.at("claim_id").get<std::string>(),
                                       p.at("model_a").get<std::string>(),
                                       p.at("model_b").get<std::string>()});
          break;
        case RecordKind::kBattle:
          view.battles.push_back(p.get<Battle>());
          break;
        case RecordKind::kJudgment:
          view.judgments.push_back(p.get<JudgmentRecord>());
          break;
        case RecordKind::kOutcome:
          view.outcomes.push_back(p.get<BattleOutcome>());
          break;
        case RecordKind::kLineage:
          view.lineages.push_back(p.get<EvolutionLineage>());
          break;
        case RecordKind::kRatingSnapshot:
          view.rating_snapshots.push_back(p.get<RatingTable>());
          break;
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kSchemaViolation,
                  "record seq " + std::to_string(r.seq) + " (" +
                      std::string(RecordKindName(r.kind)) + "): " + e.what());
    }
  }
  return view;
}

ValidityStats ComputeValidityStats(const PoolView& pool) {
  ValidityStats stats;
  stats.planned_battles = static_cast<int64_t>(pool.plan_entries.size());
  stats.scheduled_battles = static_cast<int64_t>(pool.battles.size());
  std::set<std::string> evolved;
  for (const Claim& c : pool.claims) {
    if (c.lineage) evolved.insert(c.claim_id);
  }
  for (const PipelineRun& run : pool.runs) {
    ModelParticipation& p = stats.participation[run.model_id];
    if (run.valid && !evolved.count(run.claim_id)) ++p.claims;
  }
  for (const BattleOutcome& o : pool.outcomes) {
    if (!o.quorum_met) continue;
    ++stats.valid_battles;
    bool is_evolved = evolved.count(o.claim_id) > 0;
    for (const std::string& model : {o.model_a, o.model_b}) {
      ModelParticipation& p = stats.participation[model];
      ++(is_evolved ? p.battles_evolved : p.battles_original);
    }
  }
  for (const JudgmentRecord& j : pool.judgments) {
    ++stats.judgments;
    if (j.valid) {
      ++stats.valid_judgments;
      stats.parse_failures_by_judge.try_emplace(j.judge_id, 0);
    } else {
      ++stats.parse_failures_by_judge[j.judge_id];
    }
  }
  return stats;
}

EvolutionCurve ComputeEvolutionCurve(const PoolView& pool) {
  std::map<std::string, std::pair<int64_t, int64_t>> runs_by_claim;  // valid, correct
  for (const PipelineRun& run : pool.runs) {
    if (!run.valid) continue;
    auto& [valid, correct] = runs_by_claim[run.claim_id];
    ++valid;
    if (run.correct) ++correct;
  }
  std::map<std::string, int64_t> battles_by_claim;
  for (const BattleOutcome& o : pool.outcomes) {
    if (o.quorum_met) ++battles_by_claim[o.claim_id];
  }
  std::map<int, CurvePoint> points;
  std::map<int, int64_t> correct_by_round;
  for (const EvolutionLineage& lineage : pool.lineages) {
    for (const LineageStage& stage : lineage.stages) {
      if (stage.kind == StageKind::kOriginal) continue;
      CurvePoint& point = points[stage.round];
      point.round = stage.round;
      ++point.claims;
      auto runs = runs_by_claim.find(stage.claim_id);
      if (runs != runs_by_claim.end()) {
        point.valid_runs += runs->second.first;
        correct_by_round[stage.round] += runs->second.second;
      }
      auto battles = battles_by_claim.find(stage.claim_id);
      if (battles != battles_by_claim.end()) point.battles += battles->second;
    }
  }
  if (points.empty()) {
    throw Error(ErrorCode::kNoEvolutionData, "no lineage reached a reversal");
  }
  EvolutionCurve curve;
  for (auto& [round, point] : points) {
    point.accuracy = point.valid_runs > 0
                         ? 100.0 * static_cast<double>(correct_by_round[round]) /
                               static_cast<double>(point.valid_runs)
                         : 0.0;
    curve.points.push_back(point);
  }
  return curve;
}

std::string ParticipationTsv(const ValidityStats& stats) {
  std::ostringstream out;
  out << "Models\tClaim\tBattle(OC)\tBattle(EC)\tBattle(Total)\n";
  for (const auto& [model, p] : stats.participation) {
    out << model << '\t' << p.claims << '\t' << p.battles_original << '\t'
        << p.battles_evolved << '\t' << p.total() << '\n';
  }
  return out.str();
}

std::string EvolutionCurveTsv(const EvolutionCurve& curve) {
  std::ostringstream out;
  out << "Round\tClaims\tValid Runs\tAccuracy(%)\tBattles\n";
  for (const CurvePoint& p : curve.points) {
    out << p.round << '\t' << p.claims << '\t' << p.valid_runs << '\t'
        << Percent(p.accuracy) << '\t' << p.battles << '\n';
  }
  return out.str();
}

std::string ConsistencyTsv(
    const std::map<std::string, JudgeConsistency>& consistency) {
  std::ostringstream out;
  out << "Judge\tValid Votes";
  for (Dimension dim : kAllDimensions) out << '\t' << DimensionLabel(dim);
  out << "\tAverage\n";
  std::array<double, kNumDimensions> sums{};
  double overall_sum = 0.0;
  int counted = 0;
  for (const auto& [judge, c] : consistency) {
    out << judge << '\t' << c.valid_votes;
    for (double v : c.per_dimension) out << '\t' << Percent(100.0 * v);
    out << '\t' << Percent(100.0 * c.overall) << '\n';
    if (c.valid_votes == 0) continue;
    ++counted;
    for (int d = 0; d < kNumDimensions; ++d) sums[d] += c.per_dimension[d];
    overall_sum += c.overall;
  }
  out << "Avg.\t-";
  for (double s : sums) out << '\t' << Percent(counted ? 100.0 * s / counted : 0.0);
  out << '\t' << Percent(counted ? 100.0 * overall_sum / counted : 0.0) << '\n';
  return out.str();
}

}  // namespace factarena
