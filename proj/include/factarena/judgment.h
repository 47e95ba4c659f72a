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

// Anonymized pairwise battles judged by a multi-judge panel.

#ifndef FACTARENA_JUDGMENT_H_
#define FACTARENA_JUDGMENT_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "factarena/common.h"
#include "factarena/gateway.h"
#include "factarena/guidelines.h"
#include "factarena/pipeline.h"
#include "factarena/templates.h"
#include "json.hpp"

namespace factarena {

// AB: run_a is shown as "Assistant 1". BA: run_b is shown first.
enum class PresentationOrder { kAB, kBA };

// A vote as the judge wrote it, relative to the presented labels.
enum class PresentedVote { kFirst, kSecond, kTie };

struct Battle {
  std::string battle_id;
  std::string claim_id;
  std::string model_a;
  std::string model_b;
  std::string run_a;
  std::string run_b;
  std::map<std::string, PresentationOrder> presented_order_by_judge;
  bool guideline_missing = false;
};

// "battle/<claim>/<model_a>/<model_b>"
std::string MakeBattleId(const std::string& claim_id,
                         const std::string& model_a,
                         const std::string& model_b);

struct BattleGuidelines {
  const ExtractionGuideline* extraction = nullptr;
  const EvidenceGuideline* evidence = nullptr;
  const JustificationRubric* rubric = nullptr;  // defaults to the fixed rubric
};

enum class MissingGuidelinePolicy { kAbort, kProceedFlagged };

struct JudgePrompt {
  std::string judge_id;
  std::string text;
};

struct AssembledBattle {
  Battle battle;
  std::vector<JudgePrompt> prompts;  // one per panel judge, panel order
};

// Builds one blinded prompt per judge; each judge's presentation order is
// drawn independently from (seed, battle id, judge id).
// Errors: kInvalidRun (either run invalid or the runs coincide),
// kMissingGuideline (under kAbort).
AssembledBattle AssembleBattle(
    const Templates& templates, const Claim& claim, const PipelineRun& run_a,
    const PipelineRun& run_b, const BattleGuidelines& guidelines,
    std::span<const ModelSpec> panel, uint64_t seed,
    MissingGuidelinePolicy policy = MissingGuidelinePolicy::kAbort);

// The stage-wise outputs of one run, without any model identity.
std::string FormatAssistantBlock(const PipelineRun& run);

struct ParsedVoteBlock {
  std::array<PresentedVote, kNumDimensions> votes;
  std::string rationale;
};

// Reads "CE:<1|2|tie> ER:.. H:.. I:.. S:.. R:.. OV:.." (any separators, any
// case; the last occurrence of a key wins). All seven keys are required.
std::optional<ParsedVoteBlock> ParseVoteBlock(const std::string& text);

Outcome Canonicalize(PresentedVote vote, PresentationOrder order);

struct StageVote {
  DimensionOutcomes outcomes{};
  std::string rationale;
};

struct JudgmentRecord {
  std::string battle_id;
  std::string judge_id;
  StageVote vote;
  bool valid = false;
  int attempts = 0;
};

// Asks `judge` for its verdicts and maps them back to canonical A/B using
// the judge's recorded presentation order. Parse failures after the
// re-prompts give valid = false; provider failures propagate.
JudgmentRecord JudgeBattle(Gateway& gateway, const Battle& battle,
                           const ModelSpec& judge, const std::string& prompt,
                           int max_reprompts = 2);

struct BattleOutcome {
  std::string battle_id;
  std::string claim_id;
  std::string model_a;
  std::string model_b;
  DimensionOutcomes outcomes{};
  bool quorum_met = false;
  int valid_judgments = 0;
  bool synthetic = false;  // produced by the simulator, no battle record
};

inline constexpr int kDefaultQuorum = 3;

// Per-dimension plurality over the valid records; a shared top count is a
// Tie. Errors: kNoValidJudgments, kInvalidArgument for records that belong
// to different battles or a non-positive quorum.
BattleOutcome MajorityVote(std::span<const JudgmentRecord> records,
                           int quorum = kDefaultQuorum);
BattleOutcome MajorityVote(const Battle& battle,
                           std::span<const JudgmentRecord> records,
                           int quorum = kDefaultQuorum);

struct JudgeConsistency {
  std::string judge_id;
  int valid_votes = 0;  // votes on battles that have an outcome
  std::array<double, kNumDimensions> per_dimension{};
  double overall = 0.0;  // mean over the seven dimensions
};

// Agreement of each judge's valid votes with the majority outcome of the
// same battle. Judges with no valid votes appear with valid_votes = 0 and
// zero accuracies.
std::map<std::string, JudgeConsistency> InterJudgeConsistency(
    std::span<const JudgmentRecord> records,
    std::span<const BattleOutcome> outcomes);

// With `enabled`, drops judges whose family matches either battling model.
// Errors: kEmptyPanel when nobody is left.
std::vector<ModelSpec> SelfFamilyFilter(
    const Battle& battle, std::span<const ModelSpec> panel,
    const std::map<std::string, std::string>& family_of_model, bool enabled);

void to_json(nlohmann::json& j, const Battle& b);
void from_json(const nlohmann::json& j, Battle& b);
void to_json(nlohmann::json& j, const JudgmentRecord& r);
void from_json(const nlohmann::json& j, JudgmentRecord& r);
void to_json(nlohmann::json& j, const BattleOutcome& o);
void from_json(const nlohmann::json& j, BattleOutcome& o);

}  // namespace factarena

#endif  // FACTARENA_JUDGMENT_H_
