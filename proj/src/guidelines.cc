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

#include "factarena/guidelines.h"

#include <algorithm>

#include "factarena/prompting.h"
#include "factarena/text.h"

namespace factarena {

using nlohmann::json;

std::optional<std::vector<std::string>> ParseGuidelineList(
    const std::string& text) {
  std::string body = text;
  std::string lower = text::ToLower(text);
  size_t marker = lower.rfind("guideline:");
  if (marker != std::string::npos) {
    body = text.substr(marker + std::string("guideline:").size());
  }
  std::vector<std::string> items = text::ParseNumberedList(body);
  if (items.empty()) return std::nullopt;
  return items;
}

ExtractionGuideline ConsolidateExtractionGuideline(
    Gateway& gateway, const Templates& templates, const Claim& claim,
    std::span<const CandidateSet> candidates, std::span<const ModelSpec> panel,
    uint64_t seed, const ConsolidationOptions& options) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no candidate sub-claim sets for " + claim.claim_id);
  }
  if (panel.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty judge panel");
  }
  const size_t n = candidates.size();
  const size_t m = panel.size();
  Rng rng(DeriveSeed(seed, "consolidate/" + claim.claim_id));

  ExtractionGuideline guideline;
  guideline.claim_id = claim.claim_id;
  const size_t initial = rng.UniformInt(n);
  guideline.text = text::FormatNumberedList(candidates[initial].sub_claims.sub_claims);
  guideline.initial_source = candidates[initial].run_id;
  guideline.incorporated_sources.insert(candidates[initial].run_id);

  std::vector<size_t> remaining;
  for (size_t i = 0; i < n; ++i) {
    if (i != initial) remaining.push_back(i);
  }
  rng.Shuffle(remaining);

  size_t rounds = n - 1;
  if (options.max_rounds) {
    rounds = std::min(rounds, static_cast<size_t>(std::max(0, *options.max_rounds)));
  }
  if (options.early_stop_at_six) rounds = std::min<size_t>(rounds, 6);

  size_t next_judge = rng.UniformInt(m);
  for (size_t r = 0; r < rounds; ++r) {
    const CandidateSet& candidate = candidates[remaining[r]];
    const std::string prompt = text::FillTemplate(
        templates.consolidate,
        {{"claim", claim.text},
         {"guideline", guideline.text},
         {"sub_claims", text::FormatNumberedList(candidate.sub_claims.sub_claims)}});
    bool any_eligible = false;
    bool merged = false;
    for (size_t offset = 0; offset < m && !merged; ++offset) {
      const size_t j = (next_judge + offset) % m;
      const ModelSpec& judge = panel[j];
      if (!judge.family.empty() && judge.family == candidate.family) continue;
      any_eligible = true;
      try {
        std::vector<std::string> items = AskStructured<std::vector<std::string>>(
            gateway, judge, "consolidate:" + claim.claim_id, prompt,
            ParseGuidelineList,
            "Reply with GUIDELINE: followed by the merged numbered list of "
            "sub-claims (1. ..., 2. ...).",
            options.max_reprompts);
        guideline.text = text::FormatNumberedList(items);
        guideline.editor_history.push_back(judge.id);
        guideline.edit_sources.push_back(candidate.run_id);
        guideline.incorporated_sources.insert(candidate.run_id);
        ++guideline.version;
        next_judge = (j + 1) % m;
        merged = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kParseError) throw;
      }
    }
    if (!any_eligible) {
      throw Error(ErrorCode::kEmptyPanel,
                  "every judge shares family '" + candidate.family +
                      "' with a candidate for " + claim.claim_id);
    }
    if (!merged) {
      throw Error(ErrorCode::kParseError,
                  "no judge produced a usable guideline for " + claim.claim_id);
    }
  }
  return guideline;
}

std::optional<std::vector<std::string>> ParseEntityList(
    const std::string& text) {
  std::string trimmed = text::Trim(text);
  if (text::ToUpper(trimmed) == "NONE" || text::ToUpper(trimmed) == "NONE.") {
    return std::vector<std::string>{};
  }
  std::vector<std::string> items = text::ParseBulletList(trimmed);
  if (items.empty()) items = text::ParseNumberedList(trimmed);
  if (items.empty()) return std::nullopt;
  std::vector<std::string> unique;
  for (std::string& item : items) {
    if (std::find(unique.begin(), unique.end(), item) == unique.end()) {
      unique.push_back(std::move(item));
    }
  }
  return unique;
}

EvidenceGuideline BuildEvidenceGuideline(Gateway& gateway,
                                         const Templates& templates,
                                         const Claim& claim,
                                         const ModelSpec& extractor,
                                         size_t cap, int max_reprompts) {
  EvidenceGuideline guideline;
  guideline.claim_id = claim.claim_id;
  try {
    guideline.entities = AskStructured<std::vector<std::string>>(
        gateway, extractor, "entities:" + claim.claim_id,
        text::FillTemplate(templates.entities, {{"claim", claim.text}}),
        ParseEntityList,
        "Reply with one entity per line, each starting with \"- \", or NONE.",
        max_reprompts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    guideline.fallback = true;
    return guideline;
  }

  std::vector<std::string> summaries;
  try {
    for (const std::string& entity : guideline.entities) {
      WikiPage page = gateway.WikiFetch(entity);
      if (page.found) summaries.push_back(text::Trim(page.summary_text));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kWikiUnavailable) throw;
    guideline.pages_found = 0;
    guideline.fallback = true;
    return guideline;
  }
  guideline.pages_found = static_cast<int>(summaries.size());

  auto joined_size = [&]() {
    size_t total = 0;
    for (const std::string& s : summaries) total += s.size();
    if (!summaries.empty()) total += 2 * (summaries.size() - 1);
    return total;
  };
  while (summaries.size() > 1 && joined_size() > cap) summaries.pop_back();
  if (summaries.size() == 1 && summaries[0].size() > cap) {
    summaries[0].resize(cap);
  }
  guideline.reference_text = text::Join(summaries, "\n\n");
  guideline.fallback = guideline.reference_text.empty();
  return guideline;
}

std::string JustificationRubric::Render() const {
  std::string out;
  for (const RubricCriterion& c : criteria) {
    if (!out.empty()) out += "\n";
    out += c.name + ": " + c.definition;
  }
  return out;
}

bool JustificationRubric::operator==(const JustificationRubric& other) const {
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (criteria[i].name != other.criteria[i].name ||
        criteria[i].definition != other.criteria[i].definition) {
      return false;
    }
  }
  return true;
}

const JustificationRubric& GetJustificationRubric() {
  static const JustificationRubric kRubric{{{
      {"Helpfulness",
       "the reasoning is consistent with the verdict it reaches and does "
       "not mislead."},
      {"Informativeness",
       "the reasoning uses all the salient facts from the evidence that "
       "decide the claim."},
      {"Soundness",
       "each inference is valid, the argument hangs together, and it is "
       "backed by the evidence."},
      {"Readability",
       "the reasoning is clear, grammatical and easy to follow."},
  }}};
  return kRubric;
}

void to_json(json& j, const ExtractionGuideline& g) {
  j = json{{"claim_id", g.claim_id},
           {"version", g.version},
           {"text", g.text},
           {"initial_source", g.initial_source},
           {"incorporated_sources", g.incorporated_sources},
           {"editor_history", g.editor_history},
           {"edit_sources", g.edit_sources}};
}

void from_json(const json& j, ExtractionGuideline& g) {
  g.claim_id = j.at("claim_id").get<std::string>();
  g.version = j.at("version").get<int>();
  g.text = j.at("text").get<std::string>();
  g.initial_source = j.value("initial_source", "");
  g.incorporated_sources =
      j.at("incorporated_sources").get<std::set<std::string>>();
  g.editor_history = j.at("editor_history").get<std::vector<std::string>>();
  g.edit_sources =
      j.value("edit_sources", std::vector<std::string>{});
}

void to_json(json& j, const EvidenceGuideline& g) {
  j = json{{"claim_id", g.claim_id},
           {"entities", g.entities},
           {"reference_text", g.reference_text},
           {"pages_found", g.pages_found},
           {"fallback", g.fallback},
           {"is_gold", EvidenceGuideline::kIsGold}};
}

void from_json(const json& j, EvidenceGuideline& g) {
  g.claim_id = j.at("claim_id").get<std::string>();
  g.entities = j.at("entities").get<std::vector<std::string>>();
  g.reference_text = j.at("reference_text").get<std::string>();
  g.pages_found = j.at("pages_found").get<int>();
  g.fallback = j.value("fallback", false);
}

}  // namespace factarena
