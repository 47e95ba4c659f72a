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

// Judge reference material: the consolidated claim-extraction guideline,
// the encyclopedia-grounded evidence guideline and the justification rubric.

#ifndef FACTARENA_GUIDELINES_H_
#define FACTARENA_GUIDELINES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "factarena/common.h"
#include "factarena/gateway.h"
#include "factarena/pipeline.h"
#include "factarena/templates.h"
#include "json.hpp"

namespace factarena {

// One model's decomposition offered for consolidation. `family` is used to
// keep judges away from their own family's output.
struct CandidateSet {
  std::string run_id;
  std::string family;
  SubClaimSet sub_claims;
};

struct ExtractionGuideline {
  std::string claim_id;
  int version = 0;  // number of judge edits applied
  std::string text;
  std::string initial_source;  // run_id the guideline was seeded from
  std::set<std::string> incorporated_sources;
  std::vector<std::string> editor_history;  // judge id per edit
  std::vector<std::string> edit_sources;    // run_id merged by each edit
};

struct ConsolidationOptions {
  // Caps the number of edits; unset means n - 1 (every candidate merged).
  std::optional<int> max_rounds;
  // Stop after six edits for large candidate pools.
  bool early_stop_at_six = false;
  int max_reprompts = 2;
};

// Seeds the guideline with a seed-selected candidate, then merges every
// other candidate exactly once, each by the next judge in rotation whose
// family differs from the candidate's. A judge whose answer cannot be
// parsed hands the round to the next eligible judge.
// Errors: kInvalidArgument (no candidates or no judges), kEmptyPanel (no
// judge outside the candidate's family), kParseError (every eligible judge
// failed the round).
ExtractionGuideline ConsolidateExtractionGuideline(
    Gateway& gateway, const Templates& templates, const Claim& claim,
    std::span<const CandidateSet> candidates, std::span<const ModelSpec> panel,
    uint64_t seed, const ConsolidationOptions& options = {});

std::optional<std::vector<std::string>> ParseGuidelineList(
    const std::string& text);

struct EvidenceGuideline {
  std::string claim_id;
  std::vector<std::string> entities;
  std::string reference_text;
  int pages_found = 0;
  // No usable reference: judges fall back to their own knowledge.
  bool fallback = false;
  // The reference is a factual basis for judging, never a gold label.
  static constexpr bool kIsGold = false;
};

inline constexpr size_t kEvidenceReferenceCap = 4000;

// Asks `extractor` for the named entities in the claim, fetches each page
// and concatenates the found summaries in order. Whole summaries are
// dropped from the end until the text fits in `cap` characters. A wiki
// outage or an unusable entity list gives an empty, flagged guideline.
EvidenceGuideline BuildEvidenceGuideline(Gateway& gateway,
                                         const Templates& templates,
                                         const Claim& claim,
                                         const ModelSpec& extractor,
                                         size_t cap = kEvidenceReferenceCap,
                                         int max_reprompts = 2);

// Bulleted or numbered entities, or "NONE" for an empty list.
std::optional<std::vector<std::string>> ParseEntityList(
    const std::string& text);

struct RubricCriterion {
  std::string name;
  std::string definition;
};

struct JustificationRubric {
  std::array<RubricCriterion, 4> criteria;

  std::string Render() const;
  bool operator==(const JustificationRubric& other) const;
};

// Helpfulness, Informativeness, Soundness, Readability, in that order.
const JustificationRubric& GetJustificationRubric();

void to_json(nlohmann::json& j, const ExtractionGuideline& g);
void from_json(const nlohmann::json& j, ExtractionGuideline& g);
void to_json(nlohmann::json& j, const EvidenceGuideline& g);
void from_json(const nlohmann::json& j, EvidenceGuideline& g);

}  // namespace factarena

#endif  // FACTARENA_GUIDELINES_H_
