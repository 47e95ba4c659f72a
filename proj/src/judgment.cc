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

#include "factarena/judgment.h"

#include <algorithm>
#include <regex>
#include <set>

#include "factarena/prompting.h"
#include "factarena/text.h"

namespace factarena {

using nlohmann::json;

std::string MakeBattleId(const std::string& claim_id,
                         const std::string& model_a,
                         const std::string& model_b) {
  return "battle/" + claim_id + "/" + model_a + "/" + model_b;
}

std::string FormatAssistantBlock(const PipelineRun& run) {
  std::string out = "Sub-claims:\n";
  out += text::FormatNumberedList(run.sub_claims.sub_claims);
  out += "\n\nEvidence:\n";
  out += FormatEvidence(run.evidence);
  out += "\n\nJustification:\n";
  out += run.verification.justification;
  out += "\n\nVerdict: ";
  out += text::ToUpper(VerdictName(run.verification.verdict));
  return out;
}

AssembledBattle AssembleBattle(const Templates& templates, const Claim& claim,
                               const PipelineRun& run_a,
                               const PipelineRun& run_b,
                               const BattleGuidelines& guidelines,
                               std::span<const ModelSpec> panel, uint64_t seed,
                               MissingGuidelinePolicy policy) {
  if (!run_a.valid || !run_b.valid) {
    throw Error(ErrorCode::kInvalidRun,
                "cannot battle invalid run " +
                    (run_a.valid ? run_b.run_id : run_a.run_id));
  }
  if (run_a.model_id == run_b.model_id) {
    throw Error(ErrorCode::kInvalidRun, "a model cannot battle itself");
  }
  if (run_a.claim_id != claim.claim_id || run_b.claim_id != claim.claim_id) {
    throw Error(ErrorCode::kInvalidArgument, "runs belong to another claim");
  }
  AssembledBattle out;
  Battle& battle = out.battle;
  battle.claim_id = claim.claim_id;
  battle.model_a = run_a.model_id;
  battle.model_b = run_b.model_id;
  battle.run_a = run_a.run_id;
  battle.run_b = run_b.run_id;
  battle.battle_id = MakeBattleId(claim.claim_id, run_a.model_id, run_b.model_id);

  const bool missing = !guidelines.extraction || !guidelines.evidence;
  if (missing && policy == MissingGuidelinePolicy::kAbort) {
    throw Error(ErrorCode::kMissingGuideline,
                "no guideline for claim " + claim.claim_id);
  }
  battle.guideline_missing = missing;
  const std::string extraction_text =
      guidelines.extraction ? guidelines.extraction->text
                            : "(no reference decomposition available)";
  std::string evidence_text = "(no reference text available; rely on your "
                              "own knowledge)";
  if (guidelines.evidence && !guidelines.evidence->reference_text.empty()) {
    evidence_text = guidelines.evidence->reference_text;
  }
  const JustificationRubric& rubric =
      guidelines.rubric ? *guidelines.rubric : GetJustificationRubric();
  const std::string rubric_text =
      templates.rubric.empty() ? rubric.Render() : templates.rubric;

  const std::string block_a = FormatAssistantBlock(run_a);
  const std::string block_b = FormatAssistantBlock(run_b);
  for (const ModelSpec& judge : panel) {
    Rng rng(DeriveSeed(seed, battle.battle_id + "/" + judge.id));
    PresentationOrder order =
        rng.Bernoulli(0.5) ? PresentationOrder::kBA : PresentationOrder::kAB;
    battle.presented_order_by_judge[judge.id] = order;
    const bool ab = order == PresentationOrder::kAB;
    out.prompts.push_back(
        {judge.id,
         text::FillTemplate(templates.judge,
                            {{"claim", claim.text},
                             {"guideline_extraction", extraction_text},
                             {"guideline_evidence", evidence_text},
                             {"rubric", rubric_text},
                             {"assistant_1_block", ab ? block_a : block_b},
                             {"assistant_2_block", ab ? block_b : block_a}})});
  }
  return out;
}

std::optional<ParsedVoteBlock> ParseVoteBlock(const std::string& text) {
  static const std::regex kVote(R"(\b(CE|ER|OV|H|I|S|R)\s*[:=]\s*(1|2|tie)\b)",
                                std::regex::icase);
  std::array<std::optional<PresentedVote>, kNumDimensions> votes;
  std::optional<size_t> first_vote;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kVote);
       it != std::sregex_iterator(); ++it) {
    const std::string key = text::ToUpper((*it)[1].str());
    const std::string value = text::ToLower((*it)[2].str());
    PresentedVote vote = value == "1"   ? PresentedVote::kFirst
                         : value == "2" ? PresentedVote::kSecond
                                        : PresentedVote::kTie;
    for (Dimension dim : kAllDimensions) {
      if (DimensionShortKey(dim) == key) {
        votes[static_cast<int>(dim)] = vote;
      }
    }
    if (!first_vote) first_vote = static_cast<size_t>(it->position(0));
  }
  ParsedVoteBlock out;
  for (int i = 0; i < kNumDimensions; ++i) {
    if (!votes[i]) return std::nullopt;
    out.votes[i] = *votes[i];
  }
  std::string rationale = text::Trim(text.substr(0, *first_vote));
  std::string lower = text::ToLower(rationale);
  size_t marker = lower.find("rationale:");
  if (marker != std::string::npos) {
    rationale = text::Trim(rationale.substr(marker + 10));
  }
  out.rationale = std::move(rationale);
  return out;
}

Outcome Canonicalize(PresentedVote vote, PresentationOrder order) {
  if (vote == PresentedVote::kTie) return Outcome::kTie;
  const bool first = vote == PresentedVote::kFirst;
  if (order == PresentationOrder::kAB) return first ? Outcome::kA : Outcome::kB;
  return first ? Outcome::kB : Outcome::kA;
}

JudgmentRecord JudgeBattle(Gateway& gateway, const Battle& battle,
                           const ModelSpec& judge, const std::string& prompt,
                           int max_reprompts) {
  auto order_it = battle.presented_order_by_judge.find(judge.id);
  if (order_it == battle.presented_order_by_judge.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "judge " + judge.id + " has no prompt for " + battle.battle_id);
  }
  JudgmentRecord record;
  record.battle_id = battle.battle_id;
  record.judge_id = judge.id;
  Exchange exchange;
  try {
    ParsedVoteBlock parsed = AskStructured<ParsedVoteBlock>(
        gateway, judge, "judge:" + battle.battle_id, prompt, ParseVoteBlock,
        "Your answer is missing the verdict line. Finish with exactly one "
        "line: CE:<1|2|tie> ER:<1|2|tie> H:<1|2|tie> I:<1|2|tie> "
        "S:<1|2|tie> R:<1|2|tie> OV:<1|2|tie>",
        max_reprompts, &exchange);
    for (int i = 0; i < kNumDimensions; ++i) {
      record.vote.outcomes[i] = Canonicalize(parsed.votes[i], order_it->second);
    }
    record.vote.rationale = std::move(parsed.rationale);
    record.valid = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    record.valid = false;
    record.vote.outcomes.fill(Outcome::kTie);
  }
  record.attempts = exchange.attempts;
  return record;
}

BattleOutcome MajorityVote(std::span<const JudgmentRecord> records,
                           int quorum) {
  if (quorum <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "quorum must be positive");
  }
  BattleOutcome outcome;
  std::array<std::array<int, 3>, kNumDimensions> counts{};
  for (const JudgmentRecord& r : records) {
    if (outcome.battle_id.empty()) outcome.battle_id = r.battle_id;
    if (r.battle_id != outcome.battle_id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "judgments from different battles");
    }
    if (!r.valid) continue;
    ++outcome.valid_judgments;
    for (int d = 0; d < kNumDimensions; ++d) {
      ++counts[d][static_cast<int>(r.vote.outcomes[d])];
    }
  }
  if (outcome.valid_judgments == 0) {
    throw Error(ErrorCode::kNoValidJudgments,
                "no valid judgments for " + outcome.battle_id);
  }
  for (int d = 0; d < kNumDimensions; ++d) {
    const auto& c = counts[d];
    const int top = std::max({c[0], c[1], c[2]});
    const int winners = (c[0] == top) + (c[1] == top) + (c[2] == top);
    if (winners > 1) {
      outcome.outcomes[d] = Outcome::kTie;
    } else if (c[static_cast<int>(Outcome::kA)] == top) {
      outcome.outcomes[d] = Outcome::kA;
    } else if (c[static_cast<int>(Outcome::kB)] == top) {
      outcome.outcomes[d] = Outcome::kB;
    } else {
      outcome.outcomes[d] = Outcome::kTie;
    }
  }
  outcome.quorum_met = outcome.valid_judgments >= quorum;
  return outcome;
}

BattleOutcome MajorityVote(const Battle& battle,
                           std::span<const JudgmentRecord> records,
                           int quorum) {
  for (const JudgmentRecord& r : records) {
    if (r.battle_id != battle.battle_id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "judgment for " + r.battle_id + " passed with " +
                      battle.battle_id);
    }
  }
  if (records.empty()) {
    throw Error(ErrorCode::kNoValidJudgments,
                "no judgments for " + battle.battle_id);
  }
  BattleOutcome outcome = MajorityVote(records, quorum);
  outcome.claim_id = battle.claim_id;
  outcome.model_a = battle.model_a;
  outcome.model_b = battle.model_b;
  return outcome;
}

std::map<std::string, JudgeConsistency> InterJudgeConsistency(
    std::span<const JudgmentRecord> records,
    std::span<const BattleOutcome> outcomes) {
  std::map<std::string, const BattleOutcome*> by_battle;
  for (const BattleOutcome& o : outcomes) by_battle[o.battle_id] = &o;

  std::map<std::string, JudgeConsistency> result;
  std::map<std::string, std::array<int, kNumDimensions>> matches;
  for (const JudgmentRecord& r : records) {
    JudgeConsistency& row = result[r.judge_id];
    row.judge_id = r.judge_id;
    matches[r.judge_id];
    if (!r.valid) continue;
    auto it = by_battle.find(r.battle_id);
    if (it == by_battle.end()) continue;
    ++row.valid_votes;
    for (int d = 0; d < kNumDimensions; ++d) {
      if (r.vote.outcomes[d] == it->second->outcomes[d]) {
        ++matches[r.judge_id][d];
      }
    }
  }
  for (auto& [judge, row] : result) {
    if (row.valid_votes == 0) continue;
    double sum = 0.0;
    for (int d = 0; d < kNumDimensions; ++d) {
      row.per_dimension[d] =
          static_cast<double>(matches[judge][d]) / row.valid_votes;
      sum += row.per_dimension[d];
    }
    row.overall = sum / kNumDimensions;
  }
  return result;
}

std::vector<ModelSpec> SelfFamilyFilter(
    const Battle& battle, std::span<const ModelSpec> panel,
    const std::map<std::string, std::string>& family_of_model, bool enabled) {
  std::vector<ModelSpec> eligible(panel.begin(), panel.end());
  if (!enabled) return eligible;
  auto family = [&](const std::string& model) -> std::string {
    auto it = family_of_model.find(model);
    return it == family_of_model.end() ? std::string() : it->second;
  };
  const std::string fa = family(battle.model_a);
  const std::string fb = family(battle.model_b);
  std::erase_if(eligible, [&](const ModelSpec& judge) {
    return !judge.family.empty() &&
           (judge.family == fa || judge.family == fb);
  });
  if (eligible.empty()) {
    throw Error(ErrorCode::kEmptyPanel,
                "every judge shares a family with " + battle.battle_id);
  }
  return eligible;
}

namespace {

std::string OrderName(PresentationOrder order) {
  return order == PresentationOrder::kAB ? "AB" : "BA";
}

json OutcomesToJson(const DimensionOutcomes& outcomes) {
  json j = json::object();
  for (Dimension dim : kAllDimensions) {
    j[std::string(DimensionName(dim))] =
        OutcomeName(outcomes[static_cast<int>(dim)]);
  }
  return j;
}

DimensionOutcomes OutcomesFromJson(const json& j) {
  DimensionOutcomes outcomes{};
  for (Dimension dim : kAllDimensions) {
    auto parsed = ParseOutcomeName(
        j.at(std::string(DimensionName(dim))).get<std::string>());
    if (!parsed) throw Error(ErrorCode::kSchemaViolation, "bad outcome value");
    outcomes[static_cast<int>(dim)] = *parsed;
  }
  return outcomes;
}

}  // namespace

void to_json(json& j, const Battle& b) {
  json orders = json::object();
  for (const auto& [judge, order] : b.presented_order_by_judge) {
    orders[judge] = OrderName(order);
  }
  j = json{{"battle_id", b.battle_id}, {"claim_id", b.claim_id},
           {"model_a", b.model_a},     {"model_b", b.model_b},
           {"run_a", b.run_a},         {"run_b", b.run_b},
           {"presented_order", orders}, {"guideline_missing", b.guideline_missing}};
}

void from_json(const json& j, Battle& b) {
  b.battle_id = j.at("battle_id").get<std::string>();
  b.claim_id = j.at("claim_id").get<std::string>();
  b.model_a = j.at("model_a").get<std::string>();
  b.model_b = j.at("model_b").get<std::string>();
  b.run_a = j.at("run_a").get<std::string>();
  b.run_b = j.at("run_b").get<std::string>();
  b.presented_order_by_judge.clear();
  const json orders = j.value("presented_order", json::object());
  for (const auto& [judge, order] : orders.items()) {
    b.presented_order_by_judge[judge] = order.get<std::string>() == "AB"
                                            ? PresentationOrder::kAB
                                            : PresentationOrder::kBA;
  }
  b.guideline_missing = j.value("guideline_missing", false);
}

void to_json(json& j, const JudgmentRecord& r) {
  j = json{{"battle_id", r.battle_id},
           {"judge_id", r.judge_id},
           {"valid", r.valid},
           {"attempts", r.attempts}};
  if (r.valid) {
    j["outcomes"] = OutcomesToJson(r.vote.outcomes);
    j["rationale"] = r.vote.rationale;
  }
}

void from_json(const json& j, JudgmentRecord& r) {
  r.battle_id = j.at("battle_id").get<std::string>();
  r.judge_id = j.at("judge_id").get<std::string>();
  r.valid = j.at("valid").get<bool>();
  r.attempts = j.value("attempts", 0);
  r.vote = StageVote{};
  r.vote.outcomes.fill(Outcome::kTie);
  if (r.valid) {
    r.vote.outcomes = OutcomesFromJson(j.at("outcomes"));
    r.vote.rationale = j.value("rationale", "");
  }
}

void to_json(json& j, const BattleOutcome& o) {
  j = json{{"battle_id", o.battle_id},
           {"claim_id", o.claim_id},
           {"model_a", o.model_a},
           {"model_b", o.model_b},
           {"outcomes", OutcomesToJson(o.outcomes)},
           {"quorum_met", o.quorum_met},
           {"valid_judgments", o.valid_judgments}};
  if (o.synthetic) j["synthetic"] = true;
}

void from_json(const json& j, BattleOutcome& o) {
  o.battle_id = j.at("battle_id").get<std::string>();
  o.claim_id = j.at("claim_id").get<std::string>();
  o.model_a = j.at("model_a").get<std::string>();
  o.model_b = j.at("model_b").get<std::string>();
  o.outcomes = OutcomesFromJson(j.at("outcomes"));
  o.quorum_met = j.at("quorum_met").get<bool>();
  o.valid_judgments = j.value("valid_judgments", 0);
  o.synthetic = j.value("synthetic", false);
}

}  // namespace factarena
