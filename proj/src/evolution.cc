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

#include <algorithm>
#include <regex>
#include <set>

#include "factarena/common.h"
#include "factarena/prompting.h"
#include "factarena/text.h"

namespace factarena {

using json = nlohmann::json;

namespace {

constexpr size_t kAnswerSnippet = 400;

std::string Snippet(const std::string& s) {
  std::string t = text::Trim(s);
  return t.size() <= kAnswerSnippet ? t : t.substr(0, kAnswerSnippet) + "...";
}

std::string FormatNotes(const std::vector<ModelNote>& notes) {
  if (notes.empty()) return "(none)";
  std::vector<std::string> lines;
  for (const ModelNote& n : notes) lines.push_back("- " + n.model_id + ": " + n.text);
  return text::Join(lines, "\n");
}

const char kEvolverCorrection[] =
    "Your reply did not follow the format. Reply with one line starting "
    "with \"CLAIM:\".";

}  // namespace

std::string_view StageKindName(StageKind kind) {
  switch (kind) {
    case StageKind::kOriginal: return "original";
    case StageKind::kReversed: return "reversed";
    case StageKind::kEvolved: return "evolved";
  }
  return "original";
}

std::string_view LineageStatusName(LineageStatus status) {
  switch (status) {
    case LineageStatus::kActive: return "active";
    case LineageStatus::kConverged: return "converged";
    case LineageStatus::kCapped: return "capped";
  }
  return "active";
}

bool EvolutionLineage::HasFlag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

WeaknessAnalysis BuildWeaknessAnalysis(
    const std::string& claim_id, std::span<const PipelineRun> runs,
    std::span<const Battle> battles,
    std::span<const JudgmentRecord> judgments) {
  WeaknessAnalysis analysis;
  analysis.claim_id = claim_id;
  std::vector<const PipelineRun*> own;
  for (const PipelineRun& run : runs) {
    if (run.claim_id == claim_id && run.valid) own.push_back(&run);
  }
  std::sort(own.begin(), own.end(), [](const auto* x, const auto* y) {
    return x->model_id < y->model_id;
  });
  for (const PipelineRun* run : own) {
    analysis.answers.push_back(
        {run->model_id, std::string(VerdictName(run->verification.verdict)) +
                            ". " + Snippet(run->verification.justification)});
  }
  std::map<std::string, const Battle*> by_id;
  for (const Battle& b : battles) {
    if (b.claim_id == claim_id) by_id[b.battle_id] = &b;
  }
  std::set<std::string> cited;
  const int overall = static_cast<int>(Dimension::kOverall);
  for (const JudgmentRecord& j : judgments) {
    auto it = by_id.find(j.battle_id);
    if (it == by_id.end() || !j.valid) continue;
    std::string rationale = text::Trim(j.vote.rationale);
    if (rationale.empty()) continue;
    const Battle& b = *it->second;
    std::string note = "(" + j.judge_id + ") " + Snippet(rationale);
    Outcome o = j.vote.outcomes[overall];
    if (o != Outcome::kA) analysis.weaknesses.push_back({b.model_a, note});
    if (o != Outcome::kB) analysis.weaknesses.push_back({b.model_b, note});
    cited.insert(b.battle_id);
  }
  analysis.source_judgments.assign(cited.begin(), cited.end());
  return analysis;
}

std::optional<EvolverReply> ParseEvolverReply(const std::string& reply) {
  static const std::regex kClaim(R"(^\s*\**\s*claim\s*\**\s*:\s*(.*\S)\s*$)",
                                 std::regex::icase);
  static const std::regex kDrift(
      R"(^\s*\**\s*label_drift\s*\**\s*:\s*(yes|true)\b)", std::regex::icase);
  EvolverReply parsed;
  bool found = false;
  for (const std::string& line : text::SplitLines(reply)) {
    std::smatch m;
    if (std::regex_search(line, m, kClaim)) {
      parsed.claim_text = text::Trim(m[1].str());
      found = !parsed.claim_text.empty();
    } else if (std::regex_search(line, kDrift)) {
      parsed.label_drift = true;
    }
  }
  if (!found) return std::nullopt;
  return parsed;
}

std::string ReversedClaimId(const std::string& root_id) {
  return root_id + "~r0";
}

std::string EvolvedClaimId(const std::string& root_id, int round) {
  return root_id + "~e" + std::to_string(round);
}

Claim ReverseClaim(Gateway& gateway, const Templates& templates,
                   const Claim& claim, const ModelSpec& evolver,
                   const std::string& root_id, int max_reprompts) {
  const std::string prompt = text::FillTemplate(
      templates.reverse,
      {{"claim", claim.text},
       {"verdict", std::string(VerdictName(claim.gold_verdict))}});
  const std::string scenario = "reverse:" + claim.claim_id;
  const std::string original = text::NormalizeForComparison(claim.text);
  std::optional<EvolverReply> reply;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string asked =
        attempt == 0
            ? prompt
            : prompt +
                  "\nYour previous answer repeated the original claim. The "
                  "rewrite must state something different.\n";
    reply = AskStructured<EvolverReply>(gateway, evolver, scenario, asked,
                                        ParseEvolverReply, kEvolverCorrection,
                                        max_reprompts);
    if (text::NormalizeForComparison(reply->claim_text) != original) break;
    reply.reset();
  }
  if (!reply) {
    throw Error(ErrorCode::kDegenerateReversal,
                "evolver echoed claim " + claim.claim_id + " twice");
  }
  Claim reversed;
  reversed.claim_id = ReversedClaimId(root_id);
  reversed.text = reply->claim_text;
  reversed.gold_verdict = Flip(claim.gold_verdict);
  reversed.source = ClaimSource::kEvolved;
  reversed.lineage = ClaimLineage{claim.claim_id, 0, LineageKind::kReversed};
  return reversed;
}

EvolvedVariant EvolveClaim(Gateway& gateway, const Templates& templates,
                           const Claim& claim, const WeaknessAnalysis& analysis,
                           const ModelSpec& evolver, const std::string& root_id,
                           int round, int max_reprompts) {
  if (round < 1) {
    throw Error(ErrorCode::kInvalidArgument, "evolution round must be >= 1");
  }
  if (analysis.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "empty weakness analysis for " + claim.claim_id);
  }
  const std::string prompt = text::FillTemplate(
      templates.evolve,
      {{"claim", claim.text},
       {"verdict", std::string(VerdictName(claim.gold_verdict))},
       {"model_answers", FormatNotes(analysis.answers)},
       {"judge_rationales", FormatNotes(analysis.weaknesses)}});
  EvolverReply reply = AskStructured<EvolverReply>(
      gateway, evolver, "evolve:" + claim.claim_id, prompt, ParseEvolverReply,
      kEvolverCorrection, max_reprompts);
  EvolvedVariant variant;
  variant.label_drift = reply.label_drift;
  variant.claim.claim_id = EvolvedClaimId(root_id, round);
  variant.claim.text = reply.claim_text;
  variant.claim.gold_verdict = claim.gold_verdict;
  variant.claim.source = ClaimSource::kEvolved;
  variant.claim.lineage =
      ClaimLineage{claim.claim_id, round, LineageKind::kEvolved};
  return variant;
}

bool UnanimouslyCorrect(const Correctness& correctness) {
  if (correctness.empty()) return false;
  return std::all_of(correctness.begin(), correctness.end(),
                     [](const auto& entry) { return entry.second; });
}

EvolutionLineage EvolveLineage(Gateway& gateway, const Templates& templates,
                               const Claim& root,
                               const Correctness& root_correctness,
                               const std::vector<std::string>& models,
                               const EvolutionHooks& hooks,
                               const EvolutionOptions& options) {
  EvolutionLineage lineage;
  lineage.root_claim_id = root.claim_id;
  lineage.evolver_id = options.evolver.id;
  bool unanimous = UnanimouslyCorrect(root_correctness);
  lineage.stages.push_back({root.claim_id, 0, StageKind::kOriginal, unanimous});
  if (!unanimous) {
    lineage.status = LineageStatus::kConverged;
    return lineage;
  }
  auto cap = [&](const std::string& flag) {
    lineage.flags.push_back(flag);
    lineage.status = LineageStatus::kCapped;
    return lineage;
  };

  Claim current;
  try {
    current = ReverseClaim(gateway, templates, root, options.evolver,
                           root.claim_id, options.max_reprompts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateReversal) return cap("DegenerateReversal");
    if (e.code() == ErrorCode::kParseError) return cap("EvolverParseError");
    throw;
  }
  lineage.created.push_back(current);
  unanimous = UnanimouslyCorrect(hooks.process(current, models));
  lineage.stages.push_back(
      {current.claim_id, 0, StageKind::kReversed, unanimous});

  for (int round = 1; unanimous && round <= options.max_rounds; ++round) {
    WeaknessAnalysis analysis = hooks.analyze(current);
    if (analysis.empty()) return cap("NoWeaknessData");
    EvolvedVariant variant;
    try {
      variant = EvolveClaim(gateway, templates, current, analysis,
                            options.evolver, root.claim_id, round,
                            options.max_reprompts);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError) return cap("EvolverParseError");
      throw;
    }
    if (variant.label_drift) {
      lineage.quarantined.push_back(variant.claim);
      return cap("LabelDriftSuspected");
    }
    current = variant.claim;
    lineage.created.push_back(current);
    unanimous = UnanimouslyCorrect(hooks.process(current, models));
    lineage.stages.push_back(
        {current.claim_id, round, StageKind::kEvolved, unanimous});
  }
  lineage.status =
      unanimous ? LineageStatus::kCapped : LineageStatus::kConverged;
  return lineage;
}

void to_json(json& j, const EvolutionLineage& l) {
  json stages = json::array();
  for (const LineageStage& s : l.stages) {
    stages.push_back({{"claim_id", s.claim_id},
                      {"round", s.round},
                      {"kind", StageKindName(s.kind)},
                      {"unanimous_correct", s.unanimous_correct}});
  }
  j = json{{"root_claim_id", l.root_claim_id},
           {"evolver_id", l.evolver_id},
           {"stages", stages},
           {"status", LineageStatusName(l.status)},
           {"flags", l.flags},
           {"quarantined", l.quarantined}};
}

void from_json(const json& j, EvolutionLineage& l) {
  l.root_claim_id = j.at("root_claim_id").get<std::string>();
  l.evolver_id = j.value("evolver_id", "");
  l.stages.clear();
  for (const json& s : j.at("stages")) {
    LineageStage stage;
    stage.claim_id = s.at("claim_id").get<std::string>();
    stage.round = s.at("round").get<int>();
    std::string kind = s.at("kind").get<std::string>();
    stage.kind = kind == "reversed"  ? StageKind::kReversed
                 : kind == "evolved" ? StageKind::kEvolved
                                     : StageKind::kOriginal;
    stage.unanimous_correct = s.at("unanimous_correct").get<bool>();
    l.stages.push_back(stage);
  }
  std::string status = j.at("status").get<std::string>();
  l.status = status == "converged" ? LineageStatus::kConverged
             : status == "capped"  ? LineageStatus::kCapped
                                   : LineageStatus::kActive;
  l.flags = j.value("flags", std::vector<std::string>{});
  l.quarantined = j.value("quarantined", std::vector<Claim>{});
  l.created.clear();
}

}  // namespace factarena
