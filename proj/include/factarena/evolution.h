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

// Claim evolution: reverse claims every participant solved, then rewrite
// them into harder variants guided by what the judges criticised.

#ifndef FACTARENA_EVOLUTION_H_
#define FACTARENA_EVOLUTION_H_

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "factarena/gateway.h"
#include "factarena/judgment.h"
#include "factarena/pipeline.h"
#include "factarena/templates.h"
#include "json.hpp"

namespace factarena {

enum class StageKind { kOriginal, kReversed, kEvolved };
enum class LineageStatus { kActive, kConverged, kCapped };

std::string_view StageKindName(StageKind kind);
std::string_view LineageStatusName(LineageStatus status);

struct LineageStage {
  std::string claim_id;
  int round = 0;  // original and reversal are both round 0
  StageKind kind = StageKind::kOriginal;
  bool unanimous_correct = false;
};

struct EvolutionLineage {
  std::string root_claim_id;
  std::string evolver_id;
  std::vector<LineageStage> stages;
  LineageStatus status = LineageStatus::kActive;
  // E.g. "DegenerateReversal", "LabelDriftSuspected", "EvolverParseError".
  std::vector<std::string> flags;
  // Variants held back from battles pending review.
  std::vector<Claim> quarantined;
  // Claims this lineage created, in order.
  std::vector<Claim> created;

  bool HasFlag(std::string_view flag) const;
};

struct ModelNote {
  std::string model_id;
  std::string text;
};

struct WeaknessAnalysis {
  std::string claim_id;
  // What each participant answered.
  std::vector<ModelNote> answers;
  // Judge criticism attributed to the model that did not win Overall.
  std::vector<ModelNote> weaknesses;
  std::vector<std::string> source_judgments;  // battle ids

  bool empty() const { return weaknesses.empty(); }
};

// Built only from the records passed in that belong to `claim_id`.
WeaknessAnalysis BuildWeaknessAnalysis(
    const std::string& claim_id, std::span<const PipelineRun> runs,
    std::span<const Battle> battles, std::span<const JudgmentRecord> judgments);

// Reply grammar: a "CLAIM: <text>" line, optionally "LABEL_DRIFT: yes".
struct EvolverReply {
  std::string claim_text;
  bool label_drift = false;
};
std::optional<EvolverReply> ParseEvolverReply(const std::string& text);

std::string ReversedClaimId(const std::string& root_id);
std::string EvolvedClaimId(const std::string& root_id, int round);

// Flips the gold verdict. An echo of the input is retried once with a
// note; a second echo throws kDegenerateReversal. kParseError when the
// reply never parses.
Claim ReverseClaim(Gateway& gateway, const Templates& templates,
                   const Claim& claim, const ModelSpec& evolver,
                   const std::string& root_id, int max_reprompts = 2);

struct EvolvedVariant {
  Claim claim;
  bool label_drift = false;
};

// Keeps the gold verdict. Requires round >= 1 and a non-empty analysis
// (kInvalidArgument otherwise).
EvolvedVariant EvolveClaim(Gateway& gateway, const Templates& templates,
                           const Claim& claim, const WeaknessAnalysis& analysis,
                           const ModelSpec& evolver, const std::string& root_id,
                           int round, int max_reprompts = 2);

// Correctness of each participant with a valid run on a claim.
using Correctness = std::map<std::string, bool>;

bool UnanimouslyCorrect(const Correctness& correctness);

struct EvolutionHooks {
  // Runs the pipeline and battles for a newly created claim among `models`
  // and reports who got it right.
  std::function<Correctness(const Claim&, const std::vector<std::string>&)>
      process;
  std::function<WeaknessAnalysis(const Claim&)> analyze;
};

struct EvolutionOptions {
  ModelSpec evolver;
  int max_rounds = 3;
  int max_reprompts = 2;
};

// Drives one root claim through reversal and up to max_rounds evolutions.
EvolutionLineage EvolveLineage(Gateway& gateway, const Templates& templates,
                               const Claim& root,
                               const Correctness& root_correctness,
                               const std::vector<std::string>& models,
                               const EvolutionHooks& hooks,
                               const EvolutionOptions& options);

void to_json(nlohmann::json& j, const EvolutionLineage& l);
void from_json(const nlohmann::json& j, EvolutionLineage& l);

}  // namespace factarena

#endif  // FACTARENA_EVOLUTION_H_
