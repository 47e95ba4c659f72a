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

#include "factarena/pipeline.h"

#include <regex>

#include "factarena/prompting.h"
#include "factarena/text.h"

namespace factarena {

using nlohmann::json;

std::string_view LineageKindName(LineageKind kind) {
  return kind == LineageKind::kReversed ? "reversed" : "evolved";
}

void Claim::Validate() const {
  if (claim_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "claim has no id");
  }
  if (text::Trim(text).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "claim " + claim_id + " is empty");
  }
  if (lineage) {
    if (lineage->parent_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "claim " + claim_id + " has lineage without a parent");
    }
    if ((lineage->round == 0) != (lineage->kind == LineageKind::kReversed) ||
        lineage->round < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "claim " + claim_id + ": round 0 must be the reversal");
    }
  } else if (source == ClaimSource::kEvolved) {
    throw Error(ErrorCode::kInvalidArgument,
                "evolved claim " + claim_id + " has no lineage");
  }
}

std::string MakeRunId(const std::string& model_id,
                      const std::string& claim_id) {
  return "run/" + model_id + "/" + claim_id;
}

void to_json(json& j, const Claim& c) {
  j = json{{"claim_id", c.claim_id},
           {"text", c.text},
           {"gold_verdict", VerdictName(c.gold_verdict)},
           {"source", ClaimSourceName(c.source)}};
  if (c.lineage) {
    j["lineage"] = {{"parent_id", c.lineage->parent_id},
                    {"round", c.lineage->round},
                    {"kind", LineageKindName(c.lineage->kind)}};
  }
}

void from_json(const json& j, Claim& c) {
  c.claim_id = j.at("claim_id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  auto verdict = ParseVerdictName(j.at("gold_verdict").get<std::string>());
  if (!verdict) {
    throw Error(ErrorCode::kSchemaViolation,
                "claim " + c.claim_id + " has a non-binary gold_verdict");
  }
  c.gold_verdict = *verdict;
  auto source = ParseClaimSourceName(j.value("source", "HOVER"));
  if (!source) {
    throw Error(ErrorCode::kSchemaViolation,
                "claim " + c.claim_id + " has an unknown source");
  }
  c.source = *source;
  c.lineage.reset();
  if (j.contains("lineage") && !j["lineage"].is_null()) {
    const json& l = j["lineage"];
    ClaimLineage lineage;
    lineage.parent_id = l.at("parent_id").get<std::string>();
    lineage.round = l.at("round").get<int>();
    lineage.kind = l.at("kind").get<std::string>() == "reversed"
                       ? LineageKind::kReversed
                       : LineageKind::kEvolved;
    c.lineage = lineage;
  }
}

void to_json(json& j, const SubClaimSet& s) {
  j = json{{"claim_id", s.claim_id},
           {"sub_claims", s.sub_claims},
           {"k", s.count()}};
}

void from_json(const json& j, SubClaimSet& s) {
  s.claim_id = j.at("claim_id").get<std::string>();
  s.sub_claims = j.at("sub_claims").get<std::vector<std::string>>();
}

void to_json(json& j, const PipelineRun& r) {
  j = json{{"run_id", r.run_id},
           {"claim_id", r.claim_id},
           {"model_id", r.model_id},
           {"valid", r.valid}};
  if (!r.valid) {
    j["error"] = r.error;
    return;
  }
  j["sub_claims"] = r.sub_claims;
  j["evidence"] = {{"items", r.evidence.items},
                   {"web_context", r.evidence.web_context},
                   {"degraded", r.evidence.degraded}};
  j["verification"] = {{"justification", r.verification.justification},
                       {"verdict", VerdictName(r.verification.verdict)}};
  j["correct"] = r.correct;
  j["timing_ms"] = {{"extract", r.timing.extract_ms},
                    {"evidence", r.timing.evidence_ms},
                    {"verify", r.timing.verify_ms}};
}

void from_json(const json& j, PipelineRun& r) {
  r = PipelineRun{};
  r.run_id = j.at("run_id").get<std::string>();
  r.claim_id = j.at("claim_id").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.valid = j.at("valid").get<bool>();
  if (!r.valid) {
    r.error = j.value("error", "");
    return;
  }
  r.sub_claims = j.at("sub_claims").get<SubClaimSet>();
  const json& ev = j.at("evidence");
  r.evidence.claim_id = r.claim_id;
  r.evidence.items = ev.at("items").get<std::vector<std::string>>();
  r.evidence.web_context =
      ev.at("web_context").get<std::vector<SearchResult>>();
  r.evidence.degraded = ev.value("degraded", false);
  const json& ver = j.at("verification");
  r.verification.justification = ver.at("justification").get<std::string>();
  auto verdict = ParseVerdictName(ver.at("verdict").get<std::string>());
  if (!verdict) throw Error(ErrorCode::kSchemaViolation, "bad run verdict");
  r.verification.verdict = *verdict;
  r.correct = j.at("correct").get<bool>();
  if (j.contains("timing_ms")) {
    r.timing.extract_ms = j["timing_ms"].value("extract", int64_t{0});
    r.timing.evidence_ms = j["timing_ms"].value("evidence", int64_t{0});
    r.timing.verify_ms = j["timing_ms"].value("verify", int64_t{0});
  }
}

std::optional<std::vector<std::string>> ParseSubClaims(
    const std::string& text) {
  std::vector<std::string> items = text::ParseNumberedList(text);
  if (items.empty()) return std::nullopt;
  return items;
}

std::optional<std::vector<std::string>> ParseEvidenceItems(
    const std::string& text) {
  std::vector<std::string> items = text::ParseBulletList(text);
  if (items.empty()) items = text::ParseNumberedList(text);
  if (items.empty()) return std::nullopt;
  return items;
}

std::optional<VerificationOutput> ParseVerification(const std::string& text) {
  static const std::regex kMarker(
      R"(verdict\s*[:=]\s*\**\s*(supported|refuted)\b)", std::regex::icase);
  std::smatch last;
  bool found = false;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kMarker);
       it != std::sregex_iterator(); ++it) {
    last = *it;
    found = true;
  }
  if (!found) return std::nullopt;
  VerificationOutput out;
  out.verdict = text::ToLower(last[1].str()) == "supported"
                    ? Verdict::kSupported
                    : Verdict::kRefuted;
  size_t begin = static_cast<size_t>(last.position(0));
  std::string justification = text::Trim(text.substr(0, begin));
  if (justification.empty()) {
    justification =
        text::Trim(text.substr(begin + static_cast<size_t>(last.length(0))));
  }
  if (justification.empty()) return std::nullopt;
  out.justification = std::move(justification);
  return out;
}

std::string FormatWebContext(const std::vector<SearchResult>& results) {
  if (results.empty()) return "(no web results available)";
  std::string out;
  for (const SearchResult& r : results) {
    if (!out.empty()) out += "\n";
    out += "[" + std::to_string(r.rank) + "] " + r.title + "\n" + r.snippet;
  }
  return out;
}

std::string FormatEvidence(const Evidence& evidence) {
  if (evidence.items.empty()) return "(no evidence collected)";
  std::string out;
  for (const std::string& item : evidence.items) {
    if (!out.empty()) out += "\n";
    out += "- " + item;
  }
  return out;
}

FactCheckPipeline::FactCheckPipeline(Gateway& gateway, Templates templates,
                                     PipelineOptions options,
                                     std::shared_ptr<Clock> timing_clock)
    : gateway_(gateway),
      templates_(std::move(templates)),
      options_(options),
      timing_clock_(std::move(timing_clock)) {
  if (options_.top_k <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "top_k must be positive");
  }
}

SubClaimSet FactCheckPipeline::ExtractClaims(const ModelSpec& model,
                                             const Claim& claim) {
  std::string prompt =
      text::FillTemplate(templates_.extract, {{"claim", claim.text}});
  SubClaimSet out;
  out.claim_id = claim.claim_id;
  out.sub_claims = AskStructured<std::vector<std::string>>(
      gateway_, model, "extract:" + claim.claim_id, prompt, ParseSubClaims,
      "Your answer did not contain a numbered list. Reply only with the "
      "sub-claims as a numbered list (1. ..., 2. ...).",
      options_.max_reprompts);
  return out;
}

Evidence FactCheckPipeline::RetrieveEvidence(const ModelSpec& model,
                                             const Claim& claim,
                                             const SubClaimSet& sub_claims) {
  Evidence evidence;
  evidence.claim_id = claim.claim_id;
  try {
    evidence.web_context = gateway_.Search(claim.text, options_.top_k);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyResults) {
      evidence.degraded = true;
    } else if (e.code() == ErrorCode::kSearchUnavailable &&
               options_.tolerate_degraded) {
      evidence.degraded = true;
    } else {
      throw;
    }
  }
  std::string prompt = text::FillTemplate(
      templates_.evidence,
      {{"claim", claim.text},
       {"sub_claims", text::FormatNumberedList(sub_claims.sub_claims)},
       {"web_context", FormatWebContext(evidence.web_context)}});
  try {
    evidence.items = AskStructured<std::vector<std::string>>(
        gateway_, model, "evidence:" + claim.claim_id, prompt,
        ParseEvidenceItems,
        "Your answer did not contain a list of facts. Reply only with one "
        "fact per line, each starting with \"- \".",
        options_.max_reprompts);
  } catch (const Error& e) {
    // With no web context an empty evidence list is acceptable.
    if (e.code() != ErrorCode::kParseError || !evidence.web_context.empty()) {
      throw;
    }
    evidence.degraded = true;
  }
  return evidence;
}

VerificationOutput FactCheckPipeline::Verify(const ModelSpec& model,
                                             const Claim& claim,
                                             const SubClaimSet& sub_claims,
                                             const Evidence& evidence) {
  std::string prompt = text::FillTemplate(
      templates_.verify,
      {{"claim", claim.text},
       {"sub_claims", text::FormatNumberedList(sub_claims.sub_claims)},
       {"evidence", FormatEvidence(evidence)}});
  return AskStructured<VerificationOutput>(
      gateway_, model, "verify:" + claim.claim_id, prompt, ParseVerification,
      "Your answer did not end with a verdict line. Give your reasoning and "
      "end with exactly one line: VERDICT: SUPPORTED or VERDICT: REFUTED.",
      options_.max_reprompts);
}

Clock::TimePoint FactCheckPipeline::Start() const {
  return timing_clock_ ? timing_clock_->Now() : Clock::TimePoint{};
}

int64_t FactCheckPipeline::ElapsedMs(Clock::TimePoint start) const {
  if (!timing_clock_) return 0;
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             timing_clock_->Now() - start)
      .count();
}

PipelineRun FactCheckPipeline::RunPipeline(const ModelSpec& model,
                                           const Claim& claim) {
  claim.Validate();
  PipelineRun run;
  run.run_id = MakeRunId(model.id, claim.claim_id);
  run.claim_id = claim.claim_id;
  run.model_id = model.id;
  const char* stage = "extract";
  try {
    auto t0 = Start();
    run.sub_claims = ExtractClaims(model, claim);
    run.timing.extract_ms = ElapsedMs(t0);
    stage = "evidence";
    auto t1 = Start();
    run.evidence = RetrieveEvidence(model, claim, run.sub_claims);
    run.timing.evidence_ms = ElapsedMs(t1);
    stage = "verify";
    auto t2 = Start();
    run.verification = Verify(model, claim, run.sub_claims, run.evidence);
    run.timing.verify_ms = ElapsedMs(t2);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError &&
        e.code() != ErrorCode::kSearchUnavailable &&
        e.code() != ErrorCode::kEmptyResults) {
      throw;
    }
    PipelineRun invalid;
    invalid.run_id = run.run_id;
    invalid.claim_id = run.claim_id;
    invalid.model_id = run.model_id;
    invalid.valid = false;
    invalid.error = std::string(stage) + ": " + e.what();
    return invalid;
  }
  run.correct = run.verification.verdict == claim.gold_verdict;
  return run;
}

}  // namespace factarena
